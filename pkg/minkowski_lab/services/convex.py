"""Convex bodies with the origin in the interior.

Bodies are either Euclidean balls or vertex polytopes whose facet cache
(unit normals, positive offsets) is built once at construction. Every
operation is a pure function returning a new body.
"""

import itertools
from typing import Sequence, Union

import numpy as np
from scipy.spatial import ConvexHull, Delaunay, QhullError
from scipy.spatial.distance import directed_hausdorff, pdist

from minkowski_lab import schemas
from minkowski_lab.config import settings
from minkowski_lab.logger import get_logger
from minkowski_lab.models import ConvexBody, frozen_array
from minkowski_lab.utils.enums import BodyKind
from minkowski_lab.utils.exceptions import (
    DegenerateHullError,
    DimensionMismatchError,
    MixedKindsError,
    NonpositiveScaleError,
    OriginNotInteriorError,
    UnsupportedDimensionError,
)

logger = get_logger(__name__)

ArrayLike = Union[Sequence[float], np.ndarray]


def _sorted_rows(rows: np.ndarray) -> np.ndarray:
    order = np.lexsort(rows.T[::-1])
    return rows[order]


def _polytope(
    vertices: np.ndarray, normals: np.ndarray, offsets: np.ndarray, name: str = ""
) -> ConvexBody:
    order = np.lexsort(normals.T[::-1])
    return ConvexBody(
        dimension=vertices.shape[1],
        kind=BodyKind.POLYTOPE,
        vertices=frozen_array(_sorted_rows(vertices)),
        normals=frozen_array(normals[order]),
        offsets=frozen_array(offsets[order]),
        name=name,
    )


def _merge_facets(
    normals: np.ndarray, offsets: np.ndarray, tol: float
) -> tuple[np.ndarray, np.ndarray]:
    # qhull splits non-simplicial facets into coplanar simplices
    kept: list[int] = []
    for index in range(len(offsets)):
        duplicate = any(
            np.allclose(normals[index], normals[other], atol=tol)
            and abs(offsets[index] - offsets[other]) <= tol
            for other in kept
        )
        if not duplicate:
            kept.append(index)
    return normals[kept], offsets[kept]


def make_ball(dimension: int, radius: float, name: str = "") -> ConvexBody:
    """
    Creates the Euclidean ball of the given radius centred at the origin.

    Args:
        dimension: Ambient dimension.
        radius: Ball radius.
        name: Optional identifier carried into reports.

    Returns:
        ConvexBody: The ball.

    Raises:
        NonpositiveScaleError: If the radius is not positive.
    """

    if radius <= 0:
        raise NonpositiveScaleError(radius)
    return ConvexBody(dimension=dimension, kind=BodyKind.BALL, radius=float(radius), name=name)


def make_interval(lo: float, hi: float, name: str = "") -> ConvexBody:
    if hi <= lo:
        raise DegenerateHullError(1)
    if not lo < 0 < hi:
        raise OriginNotInteriorError()
    return _polytope(
        np.array([[lo], [hi]], dtype=float),
        np.array([[-1.0], [1.0]]),
        np.array([-lo, hi], dtype=float),
        name,
    )


def make_box(lo: ArrayLike, hi: ArrayLike, name: str = "") -> ConvexBody:
    """
    Creates an axis-aligned box with analytic facets, in any dimension.

    Args:
        lo: Lower corner, every coordinate negative.
        hi: Upper corner, every coordinate positive.
        name: Optional identifier.

    Returns:
        ConvexBody: The box as a polytope.

    Raises:
        DegenerateHullError: If some axis has no extent.
        OriginNotInteriorError: If the origin is not strictly inside.
    """

    lower = np.asarray(lo, dtype=float)
    upper = np.asarray(hi, dtype=float)
    dimension = lower.shape[0]
    if np.any(upper <= lower):
        raise DegenerateHullError(dimension)
    if np.any(lower >= 0) or np.any(upper <= 0):
        raise OriginNotInteriorError()

    corners = np.array(list(itertools.product(*zip(lower, upper))), dtype=float)
    identity = np.eye(dimension)
    normals = np.vstack([-identity, identity])
    offsets = np.concatenate([-lower, upper])
    return _polytope(corners, normals, offsets, name)


def make_polytope(vertices: ArrayLike, name: str = "") -> ConvexBody:
    """
    Builds the canonical polytope spanned by the given points.

    Redundant points are dropped, vertices are sorted lexicographically and
    the facet cache is built from the convex hull.

    Args:
        vertices: Points of shape (m, n), n <= 3.
        name: Optional identifier.

    Returns:
        ConvexBody: The polytope.

    Raises:
        DegenerateHullError: If the points do not span dimension n.
        OriginNotInteriorError: If the origin is on or outside the hull.
        UnsupportedDimensionError: If n > 3.
    """

    points = np.atleast_2d(np.asarray(vertices, dtype=float))
    dimension = points.shape[1]
    tol = settings.extremality_tolerance

    if dimension == 1:
        return make_interval(float(points.min()), float(points.max()), name)
    if dimension > 3:
        raise UnsupportedDimensionError(dimension, "Polytope facet enumeration")
    if points.shape[0] < dimension + 1:
        raise DegenerateHullError(dimension)

    try:
        hull = ConvexHull(points)
    except QhullError as err:
        raise DegenerateHullError(dimension) from err

    normals, offsets = _merge_facets(
        hull.equations[:, :-1], -hull.equations[:, -1], tol
    )
    if np.any(offsets <= tol):
        raise OriginNotInteriorError()

    candidates = np.unique(points[hull.vertices], axis=0)
    # a vertex is extreme when it is tight on at least n distinct facets
    tight = np.abs(candidates @ normals.T - offsets) <= tol
    extreme = candidates[tight.sum(axis=1) >= dimension]

    return _polytope(extreme, normals, offsets, name)


def body_from_description(description: schemas.BodyDescription) -> ConvexBody:
    """
    Builds a body from its scenario description.

    Args:
        description: The validated body record.

    Returns:
        ConvexBody: The body, named after the record id.
    """

    if description.kind == "ball":
        return make_ball(description.dimension, description.radius, description.id)
    if description.kind == "interval":
        lo, hi = description.interval
        return make_interval(lo, hi, description.id)
    if description.kind == "box":
        return make_box(description.lo, description.hi, description.id)
    return make_polytope(description.vertices, description.id)


def support(body: ConvexBody, directions: ArrayLike) -> Union[float, np.ndarray]:
    """
    Evaluates the support function of a body.

    Args:
        body: The convex body.
        directions: One direction (n,) or a stack of directions (..., n).

    Returns:
        float or np.ndarray: sup of x.y over the body, one value per direction.

    Raises:
        None
    """

    y = np.asarray(directions, dtype=float)
    if body.is_ball:
        values = body.radius * np.linalg.norm(y, axis=-1)
    else:
        values = np.max(y @ body.vertices.T, axis=-1)
    return values if np.ndim(values) else float(values)


def gauge(body: ConvexBody, points: ArrayLike) -> Union[float, np.ndarray]:
    """
    Evaluates the gauge (Minkowski functional) of a body.

    Args:
        body: The convex body.
        points: One point (n,) or a stack of points (..., n).

    Returns:
        float or np.ndarray: inf{t > 0 : x in tC}, zero at the origin.

    Raises:
        None
    """

    x = np.asarray(points, dtype=float)
    if body.is_ball:
        values = np.linalg.norm(x, axis=-1) / body.radius
    else:
        values = np.maximum(np.max((x @ body.normals.T) / body.offsets, axis=-1), 0.0)
    return values if np.ndim(values) else float(values)


def _member(body: ConvexBody, point: np.ndarray, hull: Delaunay | None) -> bool:
    if body.is_ball:
        return bool(np.linalg.norm(point) <= body.radius)
    if body.dimension == 1:
        return bool(body.vertices[0, 0] <= point[0] <= body.vertices[-1, 0])
    return bool(hull.find_simplex(point) >= 0)


def gauge_by_bisection(
    body: ConvexBody, point: ArrayLike, iterations: int = 200
) -> float:
    """
    Computes the gauge by bisection on t against a hull-membership test.

    Slow; used to cross-check the facet formula.

    Args:
        body: The convex body.
        point: The point x.
        iterations: Bisection steps.

    Returns:
        float: The gauge of x.
    """

    x = np.asarray(point, dtype=float)
    if not np.any(x):
        return 0.0
    hull = None if body.is_ball or body.dimension == 1 else Delaunay(body.vertices)

    upper = 1.0
    while not _member(body, x / upper, hull):
        upper *= 2.0
    lower = 0.0
    for _ in range(iterations):
        middle = 0.5 * (lower + upper)
        if middle > 0 and _member(body, x / middle, hull):
            upper = middle
        else:
            lower = middle
    return upper


def polar(body: ConvexBody) -> ConvexBody:
    """
    Returns the polar body.

    Args:
        body: The convex body.

    Returns:
        ConvexBody: Polar body, whose gauge is the support function of the input.

    Raises:
        UnsupportedDimensionError: For polytopes with n > 3.
    """

    if body.is_ball:
        return make_ball(body.dimension, 1.0 / body.radius, body.name)
    return make_polytope(body.normals / body.offsets[:, None], body.name)


def scale(body: ConvexBody, factor: float) -> ConvexBody:
    if factor <= 0:
        raise NonpositiveScaleError(factor)
    if body.is_ball:
        return make_ball(body.dimension, body.radius * factor, body.name)
    return _polytope(
        body.vertices * factor, np.array(body.normals), body.offsets * factor, body.name
    )


def reflect(body: ConvexBody) -> ConvexBody:
    if body.is_ball:
        return body
    return _polytope(-body.vertices, -body.normals, np.array(body.offsets), body.name)


def minkowski_sum(first: ConvexBody, second: ConvexBody) -> ConvexBody:
    """
    Computes the Minkowski sum of two bodies of the same kind.

    Args:
        first: A ball or a polytope.
        second: A body of the same kind and dimension.

    Returns:
        ConvexBody: The sum; support functions add.

    Raises:
        DimensionMismatchError: If the dimensions differ.
        MixedKindsError: If one body is a ball and the other a polytope.
    """

    if first.dimension != second.dimension:
        raise DimensionMismatchError(first.dimension, second.dimension)
    if first.kind != second.kind:
        raise MixedKindsError()
    if first.is_ball:
        return make_ball(first.dimension, first.radius + second.radius)

    sums = (first.vertices[:, None, :] + second.vertices[None, :, :]).reshape(
        -1, first.dimension
    )
    return make_polytope(sums)


def containment_constants(body: ConvexBody) -> tuple[float, float]:
    """
    Returns (a, b) with aC inside the unit ball and the unit ball inside bC.

    Args:
        body: The convex body.

    Returns:
        tuple[float, float]: Reciprocal circumradius and reciprocal inradius.
    """

    return 1.0 / body.circumradius, 1.0 / body.inradius


def diameter(body: ConvexBody) -> float:
    if body.is_ball:
        return 2.0 * body.radius
    return float(np.max(pdist(body.vertices)))


def contains(outer: ConvexBody, inner: ConvexBody, tol: float = 1e-12) -> bool:
    """
    Decides whether `inner` is a subset of `outer` using the gauge of `outer`.

    Args:
        outer: Candidate superset.
        inner: Candidate subset.
        tol: Relative slack on the gauge test.

    Returns:
        bool: True if inner is contained in outer.
    """

    if outer.dimension != inner.dimension:
        raise DimensionMismatchError(outer.dimension, inner.dimension)
    if inner.is_ball:
        return inner.radius <= outer.inradius * (1 + tol)
    return bool(np.all(gauge(outer, inner.vertices) <= 1 + tol))


def inner_factor(body: ConvexBody, other: ConvexBody) -> float:
    """Largest a with a*body inside other."""
    if body.is_ball:
        return other.inradius / body.radius
    return 1.0 / float(np.max(gauge(other, body.vertices)))


def outer_factor(body: ConvexBody, other: ConvexBody) -> float:
    """Smallest b with other inside b*body."""
    if other.is_ball:
        return other.radius / body.inradius
    return float(np.max(gauge(body, other.vertices)))


def vertex_hausdorff(first: ConvexBody, second: ConvexBody) -> float:
    if first.is_ball and second.is_ball:
        return abs(first.radius - second.radius)
    if first.is_ball or second.is_ball:
        return float("inf")
    return max(
        directed_hausdorff(first.vertices, second.vertices)[0],
        directed_hausdorff(second.vertices, first.vertices)[0],
    )


def describe(body: ConvexBody) -> dict:
    """
    Summarizes a body for the `bodies` command.

    Args:
        body: The convex body.

    Returns:
        dict: Support samples, polar vertices, containment constants, diameter.
    """

    dimension = body.dimension
    if dimension == 1:
        directions = np.array([[1.0], [-1.0]])
    elif dimension == 2:
        angles = np.arange(8) * np.pi / 4
        directions = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    else:
        directions = np.vstack([np.eye(dimension), -np.eye(dimension)])

    a, b = containment_constants(body)
    dual = polar(body)
    logger.info("Describing body %s", body.name or repr(body))
    return {
        "body": body.name,
        "kind": body.kind.value,
        "dimension": dimension,
        "support": [
            {"direction": direction.tolist(), "value": float(value)}
            for direction, value in zip(directions, support(body, directions))
        ],
        "polar": (
            {"radius": dual.radius} if dual.is_ball else {"vertices": dual.vertices.tolist()}
        ),
        "containment": {"a": a, "b": b},
        "diameter": diameter(body),
    }
