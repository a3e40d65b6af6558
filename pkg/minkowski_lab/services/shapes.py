"""Analytic shape algebra, boundary meshes and perimeters.

Shapes are immutable expression trees. `classify` returns Location codes
per point (OUTSIDE=-1, ON_BOUNDARY=0, INSIDE=1), so union, intersection
and difference resolve as max, min and min(A, -B) on arrays. Boundary
meshes are built from the leaves' edges, split at every crossing with
other edges of the shape and of the domain, and classified by probing
both sides of each piece.
"""

import functools
import itertools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

import numpy as np
from scipy.spatial import cKDTree

from minkowski_lab import schemas
from minkowski_lab.config import settings
from minkowski_lab.logger import get_logger
from minkowski_lab.models import BoundaryMesh, ConvexBody, frozen_array
from minkowski_lab.services import convex
from minkowski_lab.services.intervals import IntervalSet
from minkowski_lab.utils.enums import (
    ContentTarget,
    Functional,
    Location,
    Orientation,
)
from minkowski_lab.utils.exceptions import (
    DimensionMismatchError,
    NonIntervalBodyError,
    ScenarioValidationError,
    UnsupportedDimensionError,
    WindowTooSmallError,
)

logger = get_logger(__name__)

CHUNK = 1 << 16


def _codes(signed: np.ndarray, tol: float) -> np.ndarray:
    return np.where(signed < -tol, 1, np.where(signed > tol, -1, 0)).astype(np.int8)


def _as_points(points, dimension: int) -> np.ndarray:
    array = np.asarray(points, dtype=float)
    return array.reshape(-1, dimension)


def segment_distance(points: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """
    Euclidean distance from every point to the nearest of the given segments.

    Args:
        points: Array (m, n).
        starts: Segment starts (k, n).
        ends: Segment ends (k, n).

    Returns:
        np.ndarray: Distances (m,).
    """

    result = np.full(points.shape[0], np.inf)
    direction = ends - starts
    lengths = np.einsum("kn,kn->k", direction, direction)
    safe = np.where(lengths > 0, lengths, 1.0)
    for begin in range(0, points.shape[0], CHUNK):
        block = points[begin : begin + CHUNK]
        rel = block[:, None, :] - starts[None, :, :]
        t = np.clip(np.einsum("mkn,kn->mk", rel, direction) / safe, 0.0, 1.0)
        t = np.where(lengths > 0, t, 0.0)
        gap = rel - t[..., None] * direction[None, :, :]
        result[begin : begin + CHUNK] = np.sqrt(np.min(np.sum(gap**2, axis=-1), axis=1))
    return result


class Shape(ABC):
    """A set described by an expression tree over analytic leaves."""

    dimension: int

    @property
    @abstractmethod
    def null_mass(self) -> bool: ...

    @abstractmethod
    def classify(self, points) -> np.ndarray: ...

    @abstractmethod
    def bounds(self) -> tuple[np.ndarray, np.ndarray]: ...

    @abstractmethod
    def to_interval_set(self) -> IntervalSet: ...

    def leaves(self) -> Iterator["Shape"]:
        yield self

    def indicator(self, point) -> Location:
        return Location(int(self.classify(point)[0]))

    @property
    def is_bounded(self) -> bool:
        lo, hi = self.bounds()
        return bool(np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)))

    def __or__(self, other: "Shape") -> "Shape":
        return Union_((self, other))

    def __and__(self, other: "Shape") -> "Shape":
        return Intersection((self, other))

    def __sub__(self, other: "Shape") -> "Shape":
        return Difference(self, other)


@dataclass(frozen=True, eq=False)
class Ball(Shape):
    center: np.ndarray
    radius: float

    @property
    def dimension(self) -> int:
        return len(self.center)

    @property
    def null_mass(self) -> bool:
        return False

    def classify(self, points) -> np.ndarray:
        x = _as_points(points, self.dimension)
        signed = np.linalg.norm(x - self.center, axis=1) - self.radius
        return _codes(signed, settings.boundary_tolerance)

    def bounds(self):
        return self.center - self.radius, self.center + self.radius

    def to_interval_set(self) -> IntervalSet:
        c = float(self.center[0])
        return IntervalSet.interval(c - self.radius, c + self.radius, False, False)


@dataclass(frozen=True, eq=False)
class Box(Shape):
    lo: np.ndarray
    hi: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.lo)

    @property
    def null_mass(self) -> bool:
        return bool(np.any(self.hi <= self.lo))

    def classify(self, points) -> np.ndarray:
        x = _as_points(points, self.dimension)
        signed = np.max(np.maximum(self.lo - x, x - self.hi), axis=1)
        return _codes(signed, settings.boundary_tolerance)

    def bounds(self):
        return np.array(self.lo), np.array(self.hi)

    def to_interval_set(self) -> IntervalSet:
        return IntervalSet.interval(float(self.lo[0]), float(self.hi[0]), False, False)


@dataclass(frozen=True, eq=False)
class Polygon(Shape):
    """Simple polygon; the vertex loop is stored counter-clockwise."""

    vertices: np.ndarray

    def __post_init__(self):
        loop = np.asarray(self.vertices, dtype=float)
        x, y = loop[:, 0], loop[:, 1]
        signed_area = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
        if signed_area < 0:
            loop = loop[::-1]
        object.__setattr__(self, "vertices", frozen_array(loop))

    @property
    def dimension(self) -> int:
        return 2

    @property
    def null_mass(self) -> bool:
        return False

    @property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def classify(self, points) -> np.ndarray:
        x = _as_points(points, 2)
        starts, ends = self.edges
        inside = np.zeros(x.shape[0], dtype=bool)
        for begin in range(0, x.shape[0], CHUNK):
            px = x[begin : begin + CHUNK, 0:1]
            py = x[begin : begin + CHUNK, 1:2]
            ax, ay = starts[:, 0], starts[:, 1]
            bx, by = ends[:, 0], ends[:, 1]
            straddles = (ay > py) != (by > py)
            with np.errstate(divide="ignore", invalid="ignore"):
                crossing_x = ax + (py - ay) * (bx - ax) / (by - ay)
            crossings = np.sum(straddles & (px < crossing_x), axis=1)
            inside[begin : begin + CHUNK] = crossings % 2 == 1
        on_edge = segment_distance(x, starts, ends) <= settings.boundary_tolerance
        codes = np.where(inside, 1, -1).astype(np.int8)
        codes[on_edge] = Location.ON_BOUNDARY
        return codes

    def bounds(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def to_interval_set(self) -> IntervalSet:
        raise UnsupportedDimensionError(2, "Interval conversion of a polygon")


@dataclass(frozen=True, eq=False)
class Points(Shape):
    points: np.ndarray

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    @property
    def null_mass(self) -> bool:
        return True

    def classify(self, points) -> np.ndarray:
        x = _as_points(points, self.dimension)
        distance, _ = cKDTree(self.points).query(x)
        return np.where(distance <= settings.boundary_tolerance, 0, -1).astype(np.int8)

    def bounds(self):
        return self.points.min(axis=0), self.points.max(axis=0)

    def to_interval_set(self) -> IntervalSet:
        return IntervalSet.points(float(p) for p in self.points[:, 0])


@dataclass(frozen=True, eq=False)
class Segments(Shape):
    """Straight segments, shape (k, 2, n); a null set for n >= 2."""

    segments: np.ndarray

    @property
    def dimension(self) -> int:
        return self.segments.shape[2]

    @property
    def null_mass(self) -> bool:
        return True

    def classify(self, points) -> np.ndarray:
        x = _as_points(points, self.dimension)
        distance = segment_distance(x, self.segments[:, 0], self.segments[:, 1])
        return np.where(distance <= settings.boundary_tolerance, 0, -1).astype(np.int8)

    def bounds(self):
        flat = self.segments.reshape(-1, self.dimension)
        return flat.min(axis=0), flat.max(axis=0)

    def to_interval_set(self) -> IntervalSet:
        raise UnsupportedDimensionError(self.dimension, "Interval conversion of segments")


@dataclass(frozen=True, eq=False)
class Intervals(Shape):
    intervals: IntervalSet

    @property
    def dimension(self) -> int:
        return 1

    @property
    def null_mass(self) -> bool:
        return self.intervals.measure() == 0

    def classify(self, points) -> np.ndarray:
        x = _as_points(points, 1)[:, 0]
        breakpoints = np.asarray(self.intervals.breakpoints, dtype=float)
        gaps = np.asarray(self.intervals.gaps_in, dtype=bool)
        index = np.searchsorted(breakpoints, x)
        codes = np.where(gaps[index], 1, -1).astype(np.int8)
        edges = np.asarray(self.intervals.boundary().breakpoints, dtype=float)
        if edges.size:
            nearest = np.min(np.abs(x[:, None] - edges[None, :]), axis=1)
            codes[nearest <= settings.boundary_tolerance] = Location.ON_BOUNDARY
        return codes

    def bounds(self):
        lo, hi = self.intervals.bounds()
        return np.array([lo]), np.array([hi])

    def to_interval_set(self) -> IntervalSet:
        return self.intervals


@dataclass(frozen=True, eq=False)
class WholeSpace(Shape):
    dimension: int

    @property
    def null_mass(self) -> bool:
        return False

    def classify(self, points) -> np.ndarray:
        x = _as_points(points, self.dimension)
        return np.ones(x.shape[0], dtype=np.int8)

    def bounds(self):
        return np.full(self.dimension, -np.inf), np.full(self.dimension, np.inf)

    def to_interval_set(self) -> IntervalSet:
        return IntervalSet.whole()


@dataclass(frozen=True, eq=False)
class Empty(Shape):
    dimension: int

    @property
    def null_mass(self) -> bool:
        return True

    def classify(self, points) -> np.ndarray:
        x = _as_points(points, self.dimension)
        return np.full(x.shape[0], -1, dtype=np.int8)

    def bounds(self):
        return np.full(self.dimension, np.inf), np.full(self.dimension, -np.inf)

    def to_interval_set(self) -> IntervalSet:
        return IntervalSet.empty()


@dataclass(frozen=True, eq=False)
class Union_(Shape):
    operands: tuple[Shape, ...]

    @property
    def dimension(self) -> int:
        return self.operands[0].dimension

    @property
    def null_mass(self) -> bool:
        return all(op.null_mass for op in self.operands)

    def classify(self, points) -> np.ndarray:
        return np.max([op.classify(points) for op in self.operands], axis=0)

    def bounds(self):
        boxes = [op.bounds() for op in self.operands]
        return np.min([b[0] for b in boxes], axis=0), np.max([b[1] for b in boxes], axis=0)

    def to_interval_set(self) -> IntervalSet:
        return functools.reduce(
            lambda acc, op: acc | op.to_interval_set(), self.operands, IntervalSet.empty()
        )

    def leaves(self):
        for op in self.operands:
            yield from op.leaves()


@dataclass(frozen=True, eq=False)
class Intersection(Shape):
    operands: tuple[Shape, ...]

    @property
    def dimension(self) -> int:
        return self.operands[0].dimension

    @property
    def null_mass(self) -> bool:
        return any(op.null_mass for op in self.operands)

    def classify(self, points) -> np.ndarray:
        return np.min([op.classify(points) for op in self.operands], axis=0)

    def bounds(self):
        boxes = [op.bounds() for op in self.operands]
        return np.max([b[0] for b in boxes], axis=0), np.min([b[1] for b in boxes], axis=0)

    def to_interval_set(self) -> IntervalSet:
        return functools.reduce(
            lambda acc, op: acc & op.to_interval_set(), self.operands, IntervalSet.whole()
        )

    def leaves(self):
        for op in self.operands:
            yield from op.leaves()


@dataclass(frozen=True, eq=False)
class Difference(Shape):
    left: Shape
    right: Shape

    @property
    def dimension(self) -> int:
        return self.left.dimension

    @property
    def null_mass(self) -> bool:
        return self.left.null_mass

    def classify(self, points) -> np.ndarray:
        return np.minimum(self.left.classify(points), -self.right.classify(points))

    def bounds(self):
        return self.left.bounds()

    def to_interval_set(self) -> IntervalSet:
        return self.left.to_interval_set() - self.right.to_interval_set()

    def leaves(self):
        yield from self.left.leaves()
        yield from self.right.leaves()


# Leaf constructors used by scenarios, data catalogs and tests.


def ball(center: Sequence[float], radius: float) -> Ball:
    return Ball(frozen_array(center), float(radius))


def box(lo: Sequence[float], hi: Sequence[float]) -> Box:
    return Box(frozen_array(lo), frozen_array(hi))


def polygon(vertices: Sequence[Sequence[float]]) -> Polygon:
    return Polygon(np.asarray(vertices, dtype=float))


def points(values: Sequence[Sequence[float]]) -> Points:
    return Points(frozen_array(np.atleast_2d(values)))


def segments(pieces: Sequence) -> Segments:
    return Segments(frozen_array(pieces))


def intervals(components: Sequence[tuple]) -> Intervals:
    """Builds a 1-D leaf from (lo, hi) or (lo, hi, closed_lo, closed_hi) tuples."""
    normalized = [tuple(c) if len(c) == 4 else (c[0], c[1], True, True) for c in components]
    return Intervals(IntervalSet.from_components(normalized))


def union(*operands: Shape) -> Shape:
    return operands[0] if len(operands) == 1 else Union_(tuple(operands))


def intersection(*operands: Shape) -> Shape:
    return operands[0] if len(operands) == 1 else Intersection(tuple(operands))


def _polygon_section(shape: Polygon, y: float) -> IntervalSet:
    starts, ends = shape.edges
    ay, by = starts[:, 1], ends[:, 1]
    straddles = (ay > y) != (by > y)
    a, b = starts[straddles], ends[straddles]
    xs = np.sort(a[:, 0] + (y - a[:, 1]) * (b[:, 0] - a[:, 0]) / (b[:, 1] - a[:, 1]))
    pieces = [
        (float(lo), float(hi), False, False) for lo, hi in zip(xs[0::2], xs[1::2]) if lo < hi
    ]
    return IntervalSet.from_components(pieces)


def planar_section(shape: Shape, y: float) -> IntervalSet:
    """
    Cuts a planar shape with the horizontal line at height y.

    The section is exact up to finitely many points; null leaves contribute
    nothing, so its measure integrates to the area of the shape.

    Args:
        shape: A shape in the plane.
        y: Height of the cutting line.

    Returns:
        IntervalSet: The x-values of the shape on that line.

    Raises:
        UnsupportedDimensionError: If the shape is not planar.
    """

    if shape.dimension != 2:
        raise UnsupportedDimensionError(shape.dimension, "Horizontal sections")
    if isinstance(shape, Ball):
        cx, cy = (float(v) for v in shape.center)
        offset = y - cy
        if abs(offset) >= shape.radius:
            return IntervalSet.empty()
        half = math.sqrt(shape.radius**2 - offset**2)
        return IntervalSet.interval(cx - half, cx + half, False, False)
    if isinstance(shape, Box):
        if shape.null_mass or not shape.lo[1] < y < shape.hi[1]:
            return IntervalSet.empty()
        return IntervalSet.interval(float(shape.lo[0]), float(shape.hi[0]), False, False)
    if isinstance(shape, Polygon):
        return _polygon_section(shape, y)
    if isinstance(shape, WholeSpace):
        return IntervalSet.whole()
    if isinstance(shape, Union_):
        sections = (planar_section(operand, y) for operand in shape.operands)
        return functools.reduce(lambda a, b: a | b, sections)
    if isinstance(shape, Intersection):
        sections = (planar_section(operand, y) for operand in shape.operands)
        return functools.reduce(lambda a, b: a & b, sections)
    if isinstance(shape, Difference):
        return planar_section(shape.left, y) - planar_section(shape.right, y)
    return IntervalSet.empty()


def section_breaks(shape: Shape) -> list[float]:
    """Heights where the sections of a planar shape change their form."""
    heights: set[float] = set()
    for leaf in shape.leaves():
        if isinstance(leaf, Ball):
            cy = float(leaf.center[1])
            heights.update((cy - leaf.radius, cy + leaf.radius))
        elif isinstance(leaf, Box):
            heights.update((float(leaf.lo[1]), float(leaf.hi[1])))
        elif isinstance(leaf, Polygon):
            heights.update(float(v) for v in leaf.vertices[:, 1])
    return sorted(heights)


def shape_from_description(
    description: schemas.ShapeDescription, dimension: int, path: str = "shape"
) -> Shape:
    """
    Builds a shape tree from its scenario description.

    Args:
        description: The validated shape record.
        dimension: Scenario dimension every leaf must match.
        path: Field path used in validation errors.

    Returns:
        Shape: The shape.

    Raises:
        ScenarioValidationError: If a leaf does not match the dimension.
    """

    def expect(size: int, where: str) -> None:
        if size != dimension:
            raise ScenarioValidationError(
                f"{path}.{where}", f"expected dimension {dimension}, got {size}"
            )

    op = description.op
    if op == "ball":
        expect(len(description.center), "center")
        return ball(description.center, description.radius)
    if op == "box":
        expect(len(description.lo), "lo")
        expect(len(description.hi), "hi")
        return box(description.lo, description.hi)
    if op == "polygon":
        expect(2, "vertices")
        return polygon(description.vertices)
    if op == "points":
        for index, point in enumerate(description.points):
            expect(len(point), f"points.{index}")
        return points(description.points)
    if op == "segments":
        if dimension < 2:
            raise ScenarioValidationError(f"{path}.segments", "segments need n >= 2")
        for index, (start, end) in enumerate(description.segments):
            expect(len(start), f"segments.{index}")
            expect(len(end), f"segments.{index}")
        return segments([[s, e] for s, e in description.segments])
    if op == "intervals":
        expect(1, "intervals")
        return intervals(
            [(i.lo, i.hi, i.closed_lo, i.closed_hi) for i in description.intervals]
        )
    if op == "whole":
        expect(description.dimension, "dimension")
        return WholeSpace(dimension)
    if op == "difference":
        return Difference(
            shape_from_description(description.left, dimension, f"{path}.left"),
            shape_from_description(description.right, dimension, f"{path}.right"),
        )
    children = [
        shape_from_description(child, dimension, f"{path}.operands.{index}")
        for index, child in enumerate(description.operands)
    ]
    return union(*children) if op == "union" else intersection(*children)


@dataclass(frozen=True, eq=False)
class Domain:
    """The open region Omega plus the axis box all computation lives in."""

    window_lo: np.ndarray
    window_hi: np.ndarray
    open_region: Optional[Shape] = None

    @classmethod
    def create(
        cls, lo: Sequence[float], hi: Sequence[float], region: Optional[Shape] = None
    ) -> "Domain":
        return cls(frozen_array(lo), frozen_array(hi), region)

    @property
    def dimension(self) -> int:
        return len(self.window_lo)

    @property
    def region(self) -> Shape:
        return self.open_region if self.open_region is not None else WholeSpace(self.dimension)

    @property
    def is_whole(self) -> bool:
        return self.open_region is None or isinstance(self.open_region, WholeSpace)

    @property
    def window_measure(self) -> float:
        return float(np.prod(self.window_hi - self.window_lo))

    @functools.cached_property
    def unclipped(self) -> "Domain":
        """Same window, Omega replaced by the whole space."""
        return Domain(self.window_lo, self.window_hi, None)

    def restricted(self, shape: Shape) -> Shape:
        """shape intersected with Omega."""
        return shape if self.is_whole else Intersection((shape, self.region))

    def validate_window(self, subject: Shape, margin: float) -> None:
        """
        Checks that the window encloses the region inflated by `margin`.

        The region is Omega when bounded, otherwise the subject shape.

        Args:
            subject: The set the computation runs on.
            margin: Largest eps times the body diameter.

        Raises:
            WindowTooSmallError: If the inflated box leaves the window.
        """

        region = self.region if self.region.is_bounded else subject
        lo, hi = region.bounds()
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise WindowTooSmallError(margin)
        if np.any(lo - margin < self.window_lo) or np.any(hi + margin > self.window_hi):
            raise WindowTooSmallError(margin)
        logger.debug("Window checked against margin %.6g", margin)


# Boundary meshes


@dataclass(frozen=True)
class _Line:
    start: np.ndarray
    end: np.ndarray

    @property
    def direction(self) -> np.ndarray:
        return self.end - self.start

    def at(self, t: float) -> np.ndarray:
        return self.start + t * self.direction


@dataclass(frozen=True)
class _Circle:
    center: np.ndarray
    radius: float

    def at(self, angle: float) -> np.ndarray:
        return self.center + self.radius * np.array([math.cos(angle), math.sin(angle)])


Edge = Union[_Line, _Circle]


def _cross(a: np.ndarray, b: np.ndarray) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _leaf_edges(leaf: Shape) -> list[Edge]:
    if isinstance(leaf, Ball):
        return [_Circle(np.array(leaf.center), leaf.radius)]
    if isinstance(leaf, Box):
        (x0, y0), (x1, y1) = leaf.lo, leaf.hi
        corners = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)
        return [_Line(corners[i], corners[(i + 1) % 4]) for i in range(4)]
    if isinstance(leaf, Polygon):
        starts, ends = leaf.edges
        return [_Line(np.array(a), np.array(b)) for a, b in zip(starts, ends)]
    if isinstance(leaf, Segments):
        return [_Line(np.array(a), np.array(b)) for a, b in leaf.segments]
    return []


def _line_params_on_circle(line: _Line, circle: _Circle) -> list[float]:
    d = line.direction
    rel = line.start - circle.center
    a = float(d @ d)
    b = 2.0 * float(d @ rel)
    c = float(rel @ rel) - circle.radius**2
    disc = b * b - 4 * a * c
    if a == 0 or disc < 0:
        return []
    root = math.sqrt(disc)
    return [(-b - root) / (2 * a), (-b + root) / (2 * a)]


def _line_cuts(line: _Line, cutter: Edge, tol: float) -> list[float]:
    d1 = line.direction
    if isinstance(cutter, _Circle):
        return [t for t in _line_params_on_circle(line, cutter) if -tol <= t <= 1 + tol]

    d2 = cutter.direction
    rel = cutter.start - line.start
    denom = _cross(d1, d2)
    scale = float(np.linalg.norm(d1) * np.linalg.norm(d2))
    if abs(denom) > tol * scale:
        t = _cross(rel, d2) / denom
        u = _cross(rel, d1) / denom
        return [t] if -tol <= u <= 1 + tol else []
    if abs(_cross(rel, d1)) > tol * float(np.linalg.norm(d1)):
        return []
    length2 = float(d1 @ d1)
    return [float((p - line.start) @ d1) / length2 for p in (cutter.start, cutter.end)]


def _circle_cuts(circle: _Circle, cutter: Edge, tol: float) -> list[float]:
    if isinstance(cutter, _Line):
        params = [t for t in _line_params_on_circle(cutter, circle) if -tol <= t <= 1 + tol]
        hits = [cutter.at(t) for t in params]
    else:
        offset = cutter.center - circle.center
        distance = float(np.linalg.norm(offset))
        r1, r2 = circle.radius, cutter.radius
        if distance <= tol or distance > r1 + r2 + tol or distance < abs(r1 - r2) - tol:
            return []
        a = (r1**2 - r2**2 + distance**2) / (2 * distance)
        h = math.sqrt(max(r1**2 - a**2, 0.0))
        base = circle.center + a * offset / distance
        perp = np.array([-offset[1], offset[0]]) / distance
        hits = [base + h * perp, base - h * perp]
    return [
        math.atan2(p[1] - circle.center[1], p[0] - circle.center[0]) % (2 * math.pi)
        for p in hits
    ]


@dataclass
class _Piece:
    """A split edge piece: vertices of its facets plus the reference normal."""

    kind: str
    midpoint: np.ndarray
    normal: np.ndarray
    key: tuple
    vertices: np.ndarray = field(default_factory=lambda: np.empty((0, 2, 2)))
    normals: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    measures: np.ndarray = field(default_factory=lambda: np.empty(0))


def _line_pieces(line: _Line, cuts: list[float]) -> list[_Piece]:
    length = float(np.linalg.norm(line.direction))
    if length == 0:
        return []
    params = sorted({0.0, 1.0, *(min(max(t, 0.0), 1.0) for t in cuts)})
    normal = np.array([line.direction[1], -line.direction[0]]) / length
    pieces = []
    for t0, t1 in zip(params, params[1:]):
        if (t1 - t0) * length <= 1e-12:
            continue
        a, b = line.at(t0), line.at(t1)
        ends = sorted([tuple(np.round(a, 9)), tuple(np.round(b, 9))])
        pieces.append(
            _Piece(
                "line",
                line.at(0.5 * (t0 + t1)),
                normal,
                ("line", *ends),
                vertices=np.array([[a, b]]),
                normals=normal[None, :],
                measures=np.array([(t1 - t0) * length]),
            )
        )
    return pieces


def _arc_pieces(circle: _Circle, cuts: list[float], refinement: int) -> list[_Piece]:
    two_pi = 2 * math.pi
    angles = sorted({round(a % two_pi, 12) for a in cuts})
    if not angles:
        spans = [(0.0, two_pi)]
    else:
        spans = list(zip(angles, angles[1:] + [angles[0] + two_pi]))

    pieces = []
    for a0, a1 in spans:
        if (a1 - a0) * circle.radius <= 1e-12:
            continue
        count = max(1, math.ceil((a1 - a0) / two_pi * refinement))
        grid = np.linspace(a0, a1, count + 1)
        mids = 0.5 * (grid[:-1] + grid[1:])
        ring = circle.center + circle.radius * np.stack([np.cos(grid), np.sin(grid)], axis=1)
        middle = 0.5 * (a0 + a1)
        key = (
            "arc",
            *np.round(circle.center, 9),
            round(circle.radius, 9),
            round(a0 % two_pi, 9),
            round(a1 - a0, 9),
        )
        pieces.append(
            _Piece(
                "arc",
                circle.at(middle),
                np.array([math.cos(middle), math.sin(middle)]),
                key,
                vertices=np.stack([ring[:-1], ring[1:]], axis=1),
                normals=np.stack([np.cos(mids), np.sin(mids)], axis=1),
                measures=np.full(count, circle.radius * (a1 - a0) / count),
            )
        )
    return pieces


def _probe_directions(dimension: int) -> np.ndarray:
    if dimension == 2:
        angles = np.arange(8) * np.pi / 4
        return np.stack([np.cos(angles), np.sin(angles)], axis=1)
    return np.vstack([np.eye(dimension), -np.eye(dimension)])


def _point_facets(shape: Shape, domain: Domain, delta: float) -> list[tuple]:
    """Isolated points and punctures of the shape, as zero-measure facets."""
    dimension = shape.dimension
    directions = _probe_directions(dimension)
    facets = []
    for leaf in shape.leaves():
        if not isinstance(leaf, Points):
            continue
        for point in leaf.points:
            if domain.region.classify(point)[0] != Location.INSIDE:
                continue
            if shape.classify(point)[0] != Location.ON_BOUNDARY:
                continue
            probes = shape.classify(point + delta * directions) == Location.INSIDE
            if probes.all() or not probes.any():
                facets.append((point, directions[0]))
    return facets


def _classify_sides(
    shape: Shape,
    domain: Domain,
    midpoints: np.ndarray,
    normals: np.ndarray,
    delta: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns (keep, reduced, sign) per piece; sign orients the normal outward."""
    plus = shape.classify(midpoints + delta * normals) == Location.INSIDE
    minus = shape.classify(midpoints - delta * normals) == Location.INSIDE
    on_shape = shape.classify(midpoints) != Location.OUTSIDE
    in_domain = domain.region.classify(midpoints) == Location.INSIDE

    reduced = plus != minus
    slit = ~plus & ~minus & on_shape
    keep = in_domain & (reduced | slit)
    sign = np.where(plus & ~minus, -1.0, 1.0)
    return keep, reduced, sign


def _mesh_2d(shape: Shape, domain: Domain, refinement: int) -> BoundaryMesh:
    tol = settings.boundary_tolerance
    delta = settings.probe_offset
    own = [edge for leaf in shape.leaves() for edge in _leaf_edges(leaf)]
    cutters = own + (
        [] if domain.is_whole else [e for leaf in domain.region.leaves() for e in _leaf_edges(leaf)]
    )

    pieces: dict[tuple, _Piece] = {}
    for index, edge in enumerate(own):
        others = [c for j, c in enumerate(cutters) if j != index]
        if isinstance(edge, _Line):
            cuts = [t for c in others for t in _line_cuts(edge, c, tol)]
            new = _line_pieces(edge, cuts)
        else:
            cuts = [a for c in others for a in _circle_cuts(edge, c, tol)]
            new = _arc_pieces(edge, cuts, refinement)
        for piece in new:
            pieces.setdefault(piece.key, piece)

    ordered = list(pieces.values())
    vertices, normals, measures, reduced_flags, chains = [], [], [], [], []
    if ordered:
        midpoints = np.array([p.midpoint for p in ordered])
        reference = np.array([p.normal for p in ordered])
        keep, reduced, sign = _classify_sides(shape, domain, midpoints, reference, delta)
        for chain, piece in enumerate(ordered):
            if not keep[chain]:
                continue
            count = len(piece.measures)
            vertices.append(piece.vertices)
            normals.append(sign[chain] * piece.normals)
            measures.append(piece.measures)
            reduced_flags.append(np.full(count, reduced[chain]))
            chains.append(np.full(count, chain if piece.kind == "arc" else -1))

    for point, normal in _point_facets(shape, domain, delta):
        vertices.append(np.array([[point, point]]))
        normals.append(normal[None, :])
        measures.append(np.zeros(1))
        reduced_flags.append(np.zeros(1, dtype=bool))
        chains.append(np.full(1, -1))

    if not measures:
        return BoundaryMesh.empty(2)
    return BoundaryMesh.from_arrays(
        2,
        np.concatenate(vertices),
        np.concatenate(normals),
        np.concatenate(measures),
        np.concatenate(reduced_flags),
        np.concatenate(chains),
    )


def _box_triangles(leaf: Box) -> np.ndarray:
    corners = np.array(list(itertools.product(*zip(leaf.lo, leaf.hi))), dtype=float)
    faces = []
    for axis in range(3):
        for side in (0, 1):
            quad = [c for c in corners if c[axis] == (leaf.lo, leaf.hi)[side][axis]]
            quad = np.array(quad)
            others = [a for a in range(3) if a != axis]
            centre = quad.mean(axis=0)
            order = np.argsort(
                np.arctan2(quad[:, others[1]] - centre[others[1]], quad[:, others[0]] - centre[others[0]])
            )
            quad = quad[order]
            faces.append([quad[0], quad[1], quad[2]])
            faces.append([quad[0], quad[2], quad[3]])
    return np.array(faces)


def _sphere_triangles(leaf: Ball, refinement: int) -> np.ndarray:
    longitudes = max(4, refinement)
    latitudes = max(2, refinement // 2)
    theta = np.linspace(0, np.pi, latitudes + 1)
    phi = np.linspace(0, 2 * np.pi, longitudes + 1)
    grid = np.stack(
        [
            np.outer(np.sin(theta), np.cos(phi)),
            np.outer(np.sin(theta), np.sin(phi)),
            np.outer(np.cos(theta), np.ones_like(phi)),
        ],
        axis=-1,
    )
    grid = leaf.center + leaf.radius * grid
    triangles = []
    for i in range(latitudes):
        for j in range(longitudes):
            a, b = grid[i, j], grid[i, j + 1]
            c, d = grid[i + 1, j], grid[i + 1, j + 1]
            triangles.append([a, c, d])
            triangles.append([a, d, b])
    return np.array(triangles)


def _mesh_3d(shape: Shape, domain: Domain, refinement: int) -> BoundaryMesh:
    delta = settings.probe_offset
    blocks, spheres = [], []
    for leaf in shape.leaves():
        if isinstance(leaf, Box):
            block = _box_triangles(leaf)
        elif isinstance(leaf, Ball):
            block = _sphere_triangles(leaf, refinement)
        else:
            continue
        blocks.append(block)
        spheres.extend([leaf if isinstance(leaf, Ball) else None] * len(block))
    triangles = np.concatenate(blocks) if blocks else np.empty((0, 3, 3))

    cross = np.cross(triangles[:, 1] - triangles[:, 0], triangles[:, 2] - triangles[:, 0])
    doubled = np.linalg.norm(cross, axis=1)
    usable = doubled > 1e-15
    triangles, cross, doubled = triangles[usable], cross[usable], doubled[usable]
    spheres = [leaf for leaf, ok in zip(spheres, usable) if ok]
    normals = cross / doubled[:, None]
    centroids = triangles.mean(axis=1)

    # sphere facets are chords: probe from the surface point above the centroid
    anchors, directions = centroids.copy(), normals.copy()
    for index, leaf in enumerate(spheres):
        if leaf is None:
            continue
        radial = centroids[index] - leaf.center
        radial /= np.linalg.norm(radial)
        anchors[index] = leaf.center + leaf.radius * radial
        directions[index] = radial

    vertices, facet_normals, measures, flags = [], [], [], []
    if len(triangles):
        keep, reduced, sign = _classify_sides(shape, domain, anchors, directions, delta)
        vertices = list(triangles[keep])
        facet_normals = list(sign[keep, None] * directions[keep])
        measures = list(0.5 * doubled[keep])
        flags = list(reduced[keep])

    for point, normal in _point_facets(shape, domain, delta):
        vertices.append(np.array([point, point, point]))
        facet_normals.append(normal)
        measures.append(0.0)
        flags.append(False)

    if not measures:
        return BoundaryMesh.empty(3)
    return BoundaryMesh.from_arrays(
        3, np.array(vertices), np.array(facet_normals), np.array(measures), flags,
        np.full(len(measures), -1),
    )


def _mesh_1d(shape: Shape, domain: Domain) -> BoundaryMesh:
    region = domain.region.to_interval_set()
    rows = [
        (point, reduced, normal)
        for point, reduced, normal in shape.to_interval_set().boundary_orientation()
        if region.contains(point)
    ]
    if not rows:
        return BoundaryMesh.empty(1)
    return BoundaryMesh.from_arrays(
        1,
        np.array([[[point]] for point, _, _ in rows]),
        np.array([[normal if normal is not None else 1.0] for _, _, normal in rows]),
        np.ones(len(rows)),
        [reduced for _, reduced, _ in rows],
        np.full(len(rows), -1),
    )


@functools.lru_cache(maxsize=64)
def _cached_mesh(shape: Shape, domain: Domain, refinement: int) -> BoundaryMesh:
    if shape.dimension == 1:
        return _mesh_1d(shape, domain)
    if shape.dimension == 2:
        return _mesh_2d(shape, domain, refinement)
    return _mesh_3d(shape, domain, refinement)


def boundary_mesh(
    shape: Shape, domain: Domain, refinement: Optional[int] = None
) -> BoundaryMesh:
    """
    Builds the boundary facets of a shape that lie inside the domain's region.

    Args:
        shape: The shape E (or a null set S).
        domain: Domain whose open region clips the facets.
        refinement: Segments (n=2) or longitudes (n=3) per full turn of a
            curved leaf; defaults to the configured refinement.

    Returns:
        BoundaryMesh: Facets flagged reduced or topological only.

    Raises:
        DimensionMismatchError: If shape and domain dimensions differ.
        UnsupportedDimensionError: If n > 3.
    """

    if shape.dimension != domain.dimension:
        raise DimensionMismatchError(domain.dimension, shape.dimension)
    if shape.dimension > 3:
        raise UnsupportedDimensionError(shape.dimension, "boundary_mesh")
    if refinement is None:
        refinement = (
            settings.sphere_refinement if shape.dimension == 3 else settings.circle_refinement
        )
    return _cached_mesh(shape, domain, refinement)


def perimeter(shape: Shape, domain: Domain) -> float:
    return boundary_mesh(shape, domain).reduced_measure


def anisotropic_perimeter(
    shape: Shape,
    domain: Domain,
    body: ConvexBody,
    orientation: Orientation = Orientation.OUTWARD,
) -> float:
    """
    Integrates the support function of the body over the reduced boundary.

    Args:
        shape: The set E.
        domain: Domain clipping the boundary.
        body: Convex body C.
        orientation: OUTWARD uses nu, INWARD uses -nu (the complement's perimeter).

    Returns:
        float: The anisotropic perimeter.
    """

    mesh = boundary_mesh(shape, domain).reduced_part()
    if mesh.is_empty:
        return 0.0
    sign = 1.0 if orientation == Orientation.OUTWARD else -1.0
    return float(np.sum(mesh.measures * convex.support(body, sign * mesh.normals)))


def half_sum_target(shape: Shape, domain: Domain, body: ConvexBody) -> float:
    return 0.5 * (
        anisotropic_perimeter(shape, domain, body, Orientation.OUTWARD)
        + anisotropic_perimeter(shape, domain, body, Orientation.INWARD)
    )


def symmetric_facet_integral(mesh: BoundaryMesh, body: ConvexBody) -> float:
    """Half the integral of h(nu) + h(-nu) over every facet of the mesh."""
    if mesh.is_empty:
        return 0.0
    h = convex.support(body, mesh.normals) + convex.support(body, -mesh.normals)
    return float(0.5 * np.sum(mesh.measures * h))


# Exact one-dimensional engine


def target_interval_set(shape: Shape, target: ContentTarget) -> IntervalSet:
    values = shape.to_interval_set()
    if target == ContentTarget.TOPOLOGICAL:
        return values.boundary()
    if target == ContentTarget.REDUCED:
        return values.reduced_boundary()
    return values


def exact_1d_content(
    shape: Shape,
    domain: Domain,
    body: ConvexBody,
    functional: Functional,
    target: ContentTarget,
    eps: float,
) -> float:
    """
    Evaluates a content functional at fixed eps by interval arithmetic.

    Args:
        shape: A one-dimensional shape.
        domain: One-dimensional domain.
        body: An interval body [lo, hi] with lo < 0 < hi.
        functional: M, SM, FrakM or ScriptM.
        target: SET, or TOPOLOGICAL / REDUCED boundary for M and FrakM.
        eps: Dilation scale.

    Returns:
        float: The exact value, possibly infinite.

    Raises:
        NonIntervalBodyError: If the body is not one-dimensional.
    """

    if body.dimension != 1:
        raise NonIntervalBodyError()
    if shape.dimension != 1 or domain.dimension != 1:
        raise DimensionMismatchError(1, shape.dimension)
    if body.is_ball:
        lo, hi = -body.radius, body.radius
    else:
        lo, hi = float(body.vertices[0, 0]), float(body.vertices[-1, 0])

    region = domain.region.to_interval_set()
    subject = target_interval_set(shape, target)

    def grow(values: IntervalSet) -> IntervalSet:
        return values.dilate(eps * lo, eps * hi)

    def outer(values: IntervalSet) -> float:
        return (grow(values & region) & (region - values)).measure() / eps

    if functional == Functional.M:
        return (grow(subject & region) & region).measure() / (2 * eps)
    if functional == Functional.FRAK_M:
        return (grow(subject) & region).measure() / (2 * eps)
    if functional == Functional.SM:
        return outer(subject)
    return 0.5 * (outer(subject) + outer(region - subject))
