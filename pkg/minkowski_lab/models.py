import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from minkowski_lab.utils.enums import (
    BodyKind,
    ContentTarget,
    DensityClass,
    Functional,
)


def frozen_array(values, dtype=float) -> np.ndarray:
    """Return a read-only copy of the given values.

    Args:
        values: Anything numpy can turn into an array.
        dtype: Target dtype.

    Returns:
        np.ndarray: A non-writeable array.
    """
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """A convex body with the origin in its interior.

    Balls keep an empty vertex array and no facets; polytopes carry
    their canonical vertex list and the facet cache (unit normals with
    positive offsets).
    """

    dimension: int
    kind: BodyKind
    radius: Optional[float] = None
    vertices: np.ndarray = field(default_factory=lambda: frozen_array(np.empty((0, 0))))
    normals: np.ndarray = field(default_factory=lambda: frozen_array(np.empty((0, 0))))
    offsets: np.ndarray = field(default_factory=lambda: frozen_array(np.empty(0)))
    name: str = ""

    @property
    def is_ball(self) -> bool:
        return self.kind == BodyKind.BALL

    @property
    def circumradius(self) -> float:
        if self.is_ball:
            return float(self.radius)
        return float(np.max(np.linalg.norm(self.vertices, axis=1)))

    @property
    def inradius(self) -> float:
        """Radius of the largest origin-centred ball inside the body."""
        if self.is_ball:
            return float(self.radius)
        return float(np.min(self.offsets))

    def __repr__(self) -> str:
        if self.is_ball:
            return f"ConvexBody(ball, n={self.dimension}, r={self.radius:g})"
        return (
            f"ConvexBody(polytope, n={self.dimension}, "
            f"vertices={self.vertices.tolist()})"
        )


@dataclass(frozen=True)
class Grid:
    origin: tuple[float, ...]
    spacing: float
    counts: tuple[int, ...]

    @classmethod
    def covering(
        cls, lo: Sequence[float], hi: Sequence[float], cells_longest_axis: int
    ) -> "Grid":
        """Build the uniform grid covering the box [lo, hi].

        Args:
            lo: Lower window corner.
            hi: Upper window corner.
            cells_longest_axis: Number of cells along the longest axis.

        Returns:
            Grid: Grid whose spacing is the longest extent over the cell count.
        """
        lo_arr = np.asarray(lo, dtype=float)
        extents = np.asarray(hi, dtype=float) - lo_arr
        spacing = float(np.max(extents)) / cells_longest_axis
        counts = tuple(max(1, int(math.ceil(e / spacing - 1e-9))) for e in extents)
        return cls(tuple(float(v) for v in lo_arr), spacing, counts)

    @property
    def dimension(self) -> int:
        return len(self.counts)

    @property
    def cell_count(self) -> int:
        return int(np.prod(self.counts))

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dimension

    @property
    def upper(self) -> np.ndarray:
        return np.asarray(self.origin) + self.spacing * np.asarray(self.counts)

    def axis_centers(self, axis: int) -> np.ndarray:
        return self.origin[axis] + self.spacing * (np.arange(self.counts[axis]) + 0.5)

    def centers(self) -> np.ndarray:
        """Cell centres in row-major order, shape (cell_count, n)."""
        axes = [self.axis_centers(axis) for axis in range(self.dimension)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def centers_of(self, indices: np.ndarray) -> np.ndarray:
        return np.asarray(self.origin) + self.spacing * (np.asarray(indices) + 0.5)

    def index_of(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Locate the cells containing the given points.

        A point on a shared cell face belongs to the lower-index cell.

        Args:
            points: Array of shape (m, n).

        Returns:
            tuple: Integer indices (m, n) and a mask of points inside the grid.
        """
        scaled = (np.atleast_2d(points) - np.asarray(self.origin)) / self.spacing
        indices = np.ceil(scaled).astype(np.int64) - 1
        indices = np.maximum(indices, np.where(scaled >= 0, 0, -1))
        inside = np.all((indices >= 0) & (indices < np.asarray(self.counts)), axis=1)
        return indices, inside


@dataclass(frozen=True, eq=False)
class VoxelSet:
    grid: Grid
    mask: np.ndarray

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.mask))

    def with_mask(self, mask: np.ndarray) -> "VoxelSet":
        frozen = np.array(mask, dtype=bool)
        frozen.setflags(write=False)
        return VoxelSet(self.grid, frozen)

    def __and__(self, other: "VoxelSet") -> "VoxelSet":
        return self.with_mask(self.mask & other.mask)

    def __or__(self, other: "VoxelSet") -> "VoxelSet":
        return self.with_mask(self.mask | other.mask)

    def __sub__(self, other: "VoxelSet") -> "VoxelSet":
        return self.with_mask(self.mask & ~other.mask)


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: Grid
    values: np.ndarray
    body_name: str = ""
    method: str = ""


@dataclass(frozen=True, eq=False)
class Stencil:
    grid: Grid
    offsets: np.ndarray
    displacements: np.ndarray
    body: ConvexBody
    eps: float
    closed: bool = True

    @property
    def size(self) -> int:
        return int(self.offsets.shape[0])


@dataclass(frozen=True, eq=False)
class BoundaryMesh:
    """Boundary facets with outward unit normals and H^{n-1} measures.

    `vertices` has shape (m, k, n) with k = max(n, 1) vertex slots per
    facet: a point in 1-D, a segment in 2-D, a triangle in 3-D. Point
    facets in n >= 2 repeat the same vertex. `chains` groups consecutive
    facets cut from one smooth boundary piece (-1 when ungrouped).
    """

    dimension: int
    vertices: np.ndarray
    normals: np.ndarray
    measures: np.ndarray
    reduced: np.ndarray
    chains: np.ndarray

    @classmethod
    def empty(cls, dimension: int) -> "BoundaryMesh":
        slots = max(dimension, 1)
        return cls(
            dimension,
            frozen_array(np.empty((0, slots, dimension))),
            frozen_array(np.empty((0, dimension))),
            frozen_array(np.empty(0)),
            frozen_array(np.empty(0), dtype=bool),
            frozen_array(np.empty(0), dtype=np.int64),
        )

    @classmethod
    def from_arrays(
        cls, dimension, vertices, normals, measures, reduced, chains
    ) -> "BoundaryMesh":
        if len(measures) == 0:
            return cls.empty(dimension)
        return cls(
            dimension,
            frozen_array(vertices),
            frozen_array(normals),
            frozen_array(measures),
            frozen_array(reduced, dtype=bool),
            frozen_array(chains, dtype=np.int64),
        )

    @property
    def facet_count(self) -> int:
        return int(self.measures.shape[0])

    @property
    def is_empty(self) -> bool:
        return self.facet_count == 0

    @property
    def total_measure(self) -> float:
        return float(np.sum(self.measures))

    @property
    def reduced_measure(self) -> float:
        return float(np.sum(self.measures[self.reduced]))

    def centroids(self) -> np.ndarray:
        return self.vertices.mean(axis=1)

    def select(self, keep: np.ndarray) -> "BoundaryMesh":
        return BoundaryMesh.from_arrays(
            self.dimension,
            self.vertices[keep],
            self.normals[keep],
            self.measures[keep],
            self.reduced[keep],
            self.chains[keep],
        )

    def reduced_part(self) -> "BoundaryMesh":
        return self.select(self.reduced)


@dataclass(frozen=True)
class ContentCurve:
    functional: Functional
    target: ContentTarget
    body_name: str
    spacing: Optional[float]
    ladder: tuple[float, ...]
    values: tuple[float, ...]


@dataclass(frozen=True)
class ContentEstimate:
    """Extrapolated limit of a content curve.

    `lower`/`upper` span the fitted tail values and L. `limit_lower`/
    `limit_upper` span L and the finest ladder value only; the lower-bound
    flags compare against them.
    """

    value: float
    slope: float
    residual: float
    lower: float
    upper: float
    limit_lower: float
    limit_upper: float
    converged: bool


@dataclass(frozen=True)
class DensityEstimate:
    point: tuple[float, ...]
    radii: tuple[float, ...]
    ratios: tuple[float, ...]
    density: float
    classification: DensityClass


@dataclass(frozen=True, eq=False)
class VoxelLabels:
    grid: Grid
    labels: np.ndarray
