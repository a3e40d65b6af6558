LADDER_POINT = "%s(%s) body=%s eps=%.6g value=%.10g"
VERDICT_FAILED = "Existence verdict false for %s(%s) body=%s: estimate %.6g, target %.6g"
PROPERTY_FAILED = "Property check failed: %s - %s"
