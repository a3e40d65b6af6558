import math

import pytest

from minkowski_lab.services.intervals import IntervalSet
from minkowski_lab.utils.exceptions import InfiniteComponentsError


@pytest.fixture(name="interval_point_set")
def fixture_interval_point_set() -> IntervalSet:
    return IntervalSet.from_components([(0.0, 1.0, True, True), (2.0, 2.0, True, True)])


def test_components_and_measure(interval_point_set: IntervalSet):
    """
    Test case for components, measure and isolated points of [0, 1] u {2}.

    Args:
        interval_point_set (fixture): The set [0, 1] u {2}.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    assert interval_point_set.components() == [(0.0, 1.0, True, True), (2.0, 2.0, True, True)]
    assert interval_point_set.measure() == 1.0
    assert interval_point_set.isolated_points() == [2.0]
    assert interval_point_set.bounds() == (0.0, 2.0)


@pytest.mark.parametrize(
    "value, expected",
    [
        (-0.5, False),
        (0.0, True),
        (0.5, True),
        (1.0, True),
        (1.5, False),
        (2.0, True),
        (3.0, False),
    ],
)
def test_contains(interval_point_set: IntervalSet, value: float, expected: bool):
    assert interval_point_set.contains(value) is expected


def test_boundaries(interval_point_set: IntervalSet):
    """
    Test case for topological and reduced boundary points.

    Args:
        interval_point_set (fixture): The set [0, 1] u {2}.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    assert interval_point_set.boundary().isolated_points() == [0.0, 1.0, 2.0]
    assert interval_point_set.reduced_boundary().isolated_points() == [0.0, 1.0]
    assert interval_point_set.boundary_orientation() == [
        (0.0, True, -1.0),
        (1.0, True, 1.0),
        (2.0, False, None),
    ]


def test_densities(interval_point_set: IntervalSet):
    one = interval_point_set.density_one()
    zero = interval_point_set.density_zero()

    assert one.components() == [(0.0, 1.0, False, False)]
    assert zero.components() == [
        (-math.inf, 0.0, False, False),
        (1.0, math.inf, False, False),
    ]
    assert interval_point_set.interior() == one
    assert interval_point_set.closure() == interval_point_set


def test_representatives_share_measure():
    """
    Test case for sets differing by a null set: closure and interior agree in measure.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    half_open = IntervalSet.interval(0.0, 1.0, True, False)
    open_ = IntervalSet.interval(0.0, 1.0, False, False)

    assert half_open.measure() == open_.measure() == 1.0
    assert half_open.density_one() == open_.density_one()
    assert half_open.closure() == IntervalSet.interval(0.0, 1.0)


def test_dilate(interval_point_set: IntervalSet):
    dilated = interval_point_set.dilate(-0.25, 0.25)

    assert dilated.components() == [(-0.25, 1.25, True, True), (1.75, 2.25, True, True)]
    assert dilated.measure() == pytest.approx(2.0)
    assert interval_point_set.dilate(-0.25, 0.25, closed=False).components() == [
        (-0.25, 1.25, False, False),
        (1.75, 2.25, False, False),
    ]


def test_dilate_merges_components():
    pieces = IntervalSet.points([0.0, 1.0])

    assert pieces.dilate(-0.5, 0.5).components() == [(-0.5, 1.5, True, True)]
    assert pieces.dilate(-0.5, 0.5, closed=False).components() == [
        (-0.5, 0.5, False, False),
        (0.5, 1.5, False, False),
    ]


def test_boolean_algebra():
    """
    Test case for union, intersection, difference and complement.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    left = IntervalSet.interval(0.0, 2.0)
    right = IntervalSet.interval(1.0, 3.0, False, True)

    assert (left | right).components() == [(0.0, 3.0, True, True)]
    assert (left & right).components() == [(1.0, 2.0, False, True)]
    assert (left - right).components() == [(0.0, 1.0, True, True)]
    assert (~left).components() == [
        (-math.inf, 0.0, False, False),
        (2.0, math.inf, False, False),
    ]
    assert (~left).measure() == math.inf
    assert (left & ~left).is_empty
    assert (left | ~left) == IntervalSet.whole()


def test_open_pieces_glued_by_a_point():
    glued = IntervalSet.from_components(
        [(0.0, 1.0, False, False), (1.0, 1.0, True, True), (1.0, 2.0, False, False)]
    )

    assert glued.components() == [(0.0, 2.0, False, False)]
    assert glued.boundary().isolated_points() == [0.0, 2.0]


def test_degenerate_intervals():
    assert IntervalSet.interval(1.0, 1.0, False, True).is_empty
    assert IntervalSet.interval(2.0, 1.0).is_empty
    assert IntervalSet.empty().bounds() == (math.inf, -math.inf)
    with pytest.raises(InfiniteComponentsError):
        IntervalSet.interval(math.nan, 1.0)


def test_half_lines():
    ray = IntervalSet.interval(-math.inf, 0.0, False, True)

    assert ray.measure() == math.inf
    assert ray.contains(-1e9)
    assert ray.boundary().isolated_points() == [0.0]
