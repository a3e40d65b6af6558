from enum import Enum, IntEnum


class BodyKind(Enum):
    BALL = "ball"
    POLYTOPE = "polytope"


class Location(IntEnum):
    """Three-valued membership; the integer codes make boolean resolution
    a max/min/negation on arrays."""

    OUTSIDE = -1
    ON_BOUNDARY = 0
    INSIDE = 1


class Orientation(Enum):
    OUTWARD = "outward"
    INWARD = "inward"


class Functional(Enum):
    M = "M"
    SM = "SM"
    FRAK_M = "FrakM"
    SCRIPT_M = "ScriptM"


class ContentTarget(Enum):
    SET = "set"
    TOPOLOGICAL = "topological"
    REDUCED = "reduced"


class RasterMode(Enum):
    CELL_CENTER = "cell_center"
    SUPERCOVER = "supercover"


class DistanceMethod(Enum):
    BRUTE = "brute"
    CHAMFER = "chamfer"


class DilationMode(Enum):
    SEEDED = "seeded"
    STENCIL = "stencil"


class DensityClass(Enum):
    DENSITY0 = "density0"
    DENSITY1 = "density1"
    HALF = "half"
    OTHER = "other"


class VoxelLabel(IntEnum):
    E0 = 0
    E1 = 1
    ESSENTIAL = 2


class FieldFormat(Enum):
    BINARY = "binary"
    CSV = "csv"


class Subject(Enum):
    """Which set a content curve is evaluated on, relative to E and the domain."""

    E = "E"
    COMPLEMENT = "complement"
    DENSITY_ONE = "E1"
    COMPLEMENT_DENSITY_ZERO = "complement_E0"
