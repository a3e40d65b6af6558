from typing import Optional


class MinkowskiLabError(Exception):
    """Root of every error raised by the laboratory."""


class OriginNotInteriorError(MinkowskiLabError):
    def __init__(self):
        super().__init__("The origin does not lie strictly inside the convex hull.")


class DegenerateHullError(MinkowskiLabError):
    def __init__(self, dimension: int):
        super().__init__(f"Points do not span dimension {dimension}.")


class NonpositiveScaleError(MinkowskiLabError):
    def __init__(self, factor: float):
        super().__init__(f"Scale factor must be positive, got {factor}.")


class MixedKindsError(MinkowskiLabError):
    def __init__(self):
        super().__init__("Minkowski sum of a ball and a polytope is not supported.")


class UnsupportedDimensionError(MinkowskiLabError):
    def __init__(self, dimension: int, operation: str):
        super().__init__(f"{operation} is not supported in dimension {dimension}.")


class NonIntervalBodyError(MinkowskiLabError):
    def __init__(self):
        super().__init__("The exact 1-D engine requires a one-dimensional body.")


class DimensionMismatchError(MinkowskiLabError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"Dimension mismatch: expected {expected}, got {got}.")


class GridMismatchError(MinkowskiLabError):
    def __init__(self):
        super().__init__("Operands live on different grids.")


class StencilTooLargeError(MinkowskiLabError):
    def __init__(self, count: int, cap: int):
        super().__init__(
            f"Stencil needs {count} offsets, cap is {cap}; the ratio eps/h is too big."
        )


class EmptySeedError(MinkowskiLabError):
    def __init__(self):
        super().__init__("Distance field requested for an empty seed set.")


class EpsilonBelowFloorError(MinkowskiLabError):
    def __init__(self, eps: float, floor: float):
        super().__init__(f"eps={eps:g} is below the raster floor {floor:g}.")


class LadderError(MinkowskiLabError):
    def __init__(self, detail: str):
        super().__init__(f"Invalid eps ladder: {detail}")


class TooFewPointsError(MinkowskiLabError):
    def __init__(self, count: int, required: int = 3):
        super().__init__(
            f"Extrapolation needs at least {required} ladder points, got {count}."
        )


class OutOfWindowError(MinkowskiLabError):
    def __init__(self):
        super().__init__("Density ball leaves the computation window.")


class WindowTooSmallError(MinkowskiLabError):
    def __init__(self, margin: float):
        super().__init__(
            f"Computation window must enclose the region inflated by {margin:g}."
        )


class InfiniteComponentsError(MinkowskiLabError):
    def __init__(self):
        super().__init__("The exact 1-D engine only accepts finitely described sets.")


class ScenarioParseError(MinkowskiLabError):
    def __init__(self, path: str, detail: str):
        super().__init__(f"Cannot parse scenario {path}: {detail}")


class ScenarioValidationError(MinkowskiLabError):
    def __init__(self, field_path: str, detail: str):
        self.field_path = field_path
        super().__init__(f"Invalid scenario field '{field_path}': {detail}")


class ResourceCapError(MinkowskiLabError):
    def __init__(self, what: str, size: int, cap: Optional[int] = None):
        limit = f" (cap {cap})" if cap is not None else ""
        super().__init__(f"{what} of size {size} exceeds the resource cap{limit}.")


class UnsupportedTargetError(MinkowskiLabError):
    def __init__(self, target: str, kind: str):
        super().__init__(f"Target '{target}' is not available for {kind} inputs.")
