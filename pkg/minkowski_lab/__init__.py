"""Anisotropic Minkowski content laboratory."""
