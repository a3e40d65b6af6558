import math

import numpy as np
import pytest

from minkowski_lab import schemas
from minkowski_lab.models import ConvexBody
from minkowski_lab.services import convex
from minkowski_lab.utils.exceptions import (
    DegenerateHullError,
    DimensionMismatchError,
    MixedKindsError,
    NonpositiveScaleError,
    OriginNotInteriorError,
)

SQRT2 = math.sqrt(2.0)


def _directions(count: int = 64) -> np.ndarray:
    angles = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
    return np.stack([np.cos(angles), np.sin(angles)], axis=1)


@pytest.mark.parametrize(
    "name, direction, expected",
    [
        ("ball1", [3.0, 4.0], 5.0),
        ("ball2", [1.0, 0.0], 2.0),
        ("square", [1.0, 0.0], 1.0),
        ("square", [1.0, 1.0], 2.0),
        ("cross", [1.0, 1.0], 1.0),
        ("triangle", [1.0, 0.0], 2.0),
        ("triangle", [-1.0, 0.0], 1.0),
    ],
)
def test_support(bodies: dict[str, ConvexBody], name: str, direction: list, expected: float):
    """
    Test case for the support function of the standard bodies.

    Args:
        bodies (fixture): The standard bodies.
        name (str): Body id.
        direction (list): The direction y.
        expected (float): sup of x.y over the body.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    assert convex.support(bodies[name], direction) == pytest.approx(expected)


@pytest.mark.parametrize(
    "name, point, expected",
    [
        ("ball2", [2.0, 0.0], 1.0),
        ("square", [2.0, 0.0], 2.0),
        ("square", [1.0, 1.0], 1.0),
        ("cross", [1.0, 1.0], 2.0),
        ("triangle", [0.5, 0.5], 1.0),
        ("triangle", [-2.0, 0.0], 2.0),
    ],
)
def test_gauge(bodies: dict[str, ConvexBody], name: str, point: list, expected: float):
    """
    Test case for the gauge of the standard bodies.

    Args:
        bodies (fixture): The standard bodies.
        name (str): Body id.
        point (list): The point x.
        expected (float): Smallest t with x in tC.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    assert convex.gauge(bodies[name], point) == pytest.approx(expected)


def test_gauge_at_origin_is_zero(bodies: dict[str, ConvexBody]):
    for body in bodies.values():
        assert convex.gauge(body, [0.0, 0.0]) == 0.0


def test_gauge_matches_bisection(bodies: dict[str, ConvexBody]):
    """
    Test case for the facet gauge against the bisection oracle.

    Args:
        bodies (fixture): The standard bodies.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    points = [[0.3, 0.7], [-1.2, 0.4], [2.5, -3.0]]
    for body in bodies.values():
        for point in points:
            assert convex.gauge_by_bisection(body, point) == pytest.approx(
                convex.gauge(body, point), rel=1e-9
            )


def test_gauge_is_support_of_polar(bodies: dict[str, ConvexBody]):
    directions = _directions()
    for body in bodies.values():
        dual = convex.polar(body)
        assert np.allclose(convex.gauge(body, directions), convex.support(dual, directions))


def test_polar_involution(bodies: dict[str, ConvexBody]):
    for name in ("square", "cross", "triangle"):
        body = bodies[name]
        assert convex.vertex_hausdorff(convex.polar(convex.polar(body)), body) <= 1e-9


def test_polar_of_cross_is_square(bodies: dict[str, ConvexBody]):
    assert convex.vertex_hausdorff(convex.polar(bodies["cross"]), bodies["square"]) <= 1e-12


def test_polar_of_ball():
    assert convex.polar(convex.make_ball(2, 4.0)).radius == pytest.approx(0.25)


def test_make_polytope_drops_redundant_points():
    """
    Test case for canonical vertices: interior and edge points are dropped.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    body = convex.make_polytope(
        [[1.0, 1.0], [0.5, 0.5], [1.0, 0.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]
    )

    assert body.vertices.shape == (4, 2)
    assert len(body.offsets) == 4
    assert np.all(body.offsets > 0)
    assert body.vertices.tolist() == sorted(body.vertices.tolist())


@pytest.mark.parametrize(
    "vertices, error",
    [
        ([[1.0, 1.0], [2.0, 1.0], [1.0, 2.0]], OriginNotInteriorError),
        ([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], OriginNotInteriorError),
        ([[-1.0, 0.0], [1.0, 0.0]], DegenerateHullError),
        ([[-1.0, 0.0], [1.0, 0.0], [2.0, 0.0]], DegenerateHullError),
    ],
)
def test_invalid_polytope(vertices: list, error: type):
    """
    Test case for rejected vertex sets.

    Args:
        vertices (list): Candidate vertices.
        error (type): Expected exception.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    with pytest.raises(error):
        convex.make_polytope(vertices)


def test_invalid_intervals():
    with pytest.raises(DegenerateHullError):
        convex.make_interval(1.0, -1.0)
    with pytest.raises(OriginNotInteriorError):
        convex.make_interval(0.0, 1.0)


def test_one_dimensional_polytope_is_interval():
    body = convex.make_polytope([[2.0], [-1.0], [0.5]])

    assert body.vertices[:, 0].tolist() == [-1.0, 2.0]
    assert convex.support(body, [1.0]) == 2.0
    assert convex.support(body, [-1.0]) == 1.0
    assert convex.gauge(body, [-0.5]) == pytest.approx(0.5)


def test_box_in_three_dimensions():
    body = convex.make_box([-1.0, -2.0, -1.0], [1.0, 2.0, 1.0])

    assert body.vertices.shape == (8, 3)
    assert convex.gauge(body, [0.0, 1.0, 0.0]) == pytest.approx(0.5)
    assert convex.support(body, [1.0, 1.0, 1.0]) == pytest.approx(4.0)


def test_scale_and_reflect(bodies: dict[str, ConvexBody]):
    """
    Test case for scaling and reflection through the support function.

    Args:
        bodies (fixture): The standard bodies.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    directions = _directions()
    triangle = bodies["triangle"]

    assert np.allclose(
        convex.support(convex.scale(triangle, 2.5), directions),
        2.5 * convex.support(triangle, directions),
    )
    assert np.allclose(
        convex.support(convex.reflect(triangle), directions),
        convex.support(triangle, -directions),
    )
    with pytest.raises(NonpositiveScaleError):
        convex.scale(triangle, 0.0)


@pytest.mark.parametrize(
    "first, second", [("ball1", "ball2"), ("square", "triangle"), ("cross", "square")]
)
def test_minkowski_sum_adds_supports(bodies: dict[str, ConvexBody], first: str, second: str):
    directions = _directions()
    total = convex.minkowski_sum(bodies[first], bodies[second])

    assert np.allclose(
        convex.support(total, directions),
        convex.support(bodies[first], directions) + convex.support(bodies[second], directions),
    )


def test_minkowski_sum_errors(bodies: dict[str, ConvexBody]):
    with pytest.raises(MixedKindsError):
        convex.minkowski_sum(bodies["ball1"], bodies["square"])
    with pytest.raises(DimensionMismatchError):
        convex.minkowski_sum(bodies["square"], convex.make_interval(-1.0, 1.0))


def test_containment_and_factors(bodies: dict[str, ConvexBody]):
    """
    Test case for containment constants, inclusion and sandwich factors.

    Args:
        bodies (fixture): The standard bodies.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    square, cross, ball1 = bodies["square"], bodies["cross"], bodies["ball1"]

    a, b = convex.containment_constants(square)
    assert a == pytest.approx(1 / SQRT2)
    assert b == pytest.approx(1.0)

    assert convex.contains(square, ball1)
    assert convex.contains(square, cross)
    assert not convex.contains(cross, square)

    assert convex.inner_factor(square, ball1) == pytest.approx(1 / SQRT2)
    assert convex.outer_factor(square, ball1) == pytest.approx(1.0)
    assert convex.inner_factor(cross, square) == pytest.approx(1.0)
    assert convex.outer_factor(cross, square) == pytest.approx(2.0)


def test_diameter(bodies: dict[str, ConvexBody]):
    assert convex.diameter(bodies["ball2"]) == 4.0
    assert convex.diameter(bodies["square"]) == pytest.approx(2 * SQRT2)
    assert convex.diameter(bodies["triangle"]) == pytest.approx(3 * SQRT2)


def test_body_from_description():
    description = schemas.BodyDescription(id="box", kind="box", lo=[-1.0, -0.5], hi=[2.0, 0.5])
    body = convex.body_from_description(description)

    assert body.name == "box"
    assert convex.support(body, [0.0, 1.0]) == pytest.approx(0.5)
    assert convex.support(body, [1.0, 0.0]) == pytest.approx(2.0)


def test_describe(bodies: dict[str, ConvexBody]):
    """
    Test case for the body summary.

    Args:
        bodies (fixture): The standard bodies.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    summary = convex.describe(bodies["square"])

    assert summary["kind"] == "polytope"
    assert summary["dimension"] == 2
    assert len(summary["support"]) == 8
    assert summary["support"][0]["value"] == pytest.approx(1.0)
    assert summary["support"][1]["value"] == pytest.approx(SQRT2)
    polar_vertices = sorted(tuple(v) for v in np.round(summary["polar"]["vertices"], 9))
    assert polar_vertices == [(-1.0, 0.0), (0.0, -1.0), (0.0, 1.0), (1.0, 0.0)]
    assert summary["containment"]["b"] == pytest.approx(1.0)
    assert summary["diameter"] == pytest.approx(2 * SQRT2)

    assert convex.describe(bodies["ball2"])["polar"] == {"radius": 0.5}
