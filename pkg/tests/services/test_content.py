import math

import pytest

from minkowski_lab.models import ContentCurve, ConvexBody, Grid
from minkowski_lab.services import content, convex, raster, shapes
from minkowski_lab.services.content import ContentService
from minkowski_lab.utils.enums import ContentTarget, Functional, Subject
from minkowski_lab.utils.exceptions import (
    DimensionMismatchError,
    EpsilonBelowFloorError,
    LadderError,
    TooFewPointsError,
    UnsupportedTargetError,
)

EXACT_LADDER = [0.25, 0.125, 0.0625, 0.03125]
PLANAR_LADDER = [0.3125, 0.25, 0.1875, 0.125]


def _curve(ladder: list[float], values: list[float]) -> ContentCurve:
    return ContentCurve(
        functional=Functional.M,
        target=ContentTarget.SET,
        body_name="test",
        spacing=None,
        ladder=tuple(ladder),
        values=tuple(values),
    )


def test_default_ladder(coarse_grid: Grid):
    assert content.default_ladder() == EXACT_LADDER
    assert content.default_ladder(coarse_grid, points=3) == [4.0, 2.0, 1.0]
    assert content.default_ladder(eps_max=1.0, points=3) == [1.0, 0.5, 0.25]


@pytest.mark.parametrize(
    "ladder, error",
    [
        ([], LadderError),
        ([0.1, 0.2, 0.05], LadderError),
        ([0.2, 0.1, 0.1], LadderError),
        ([0.2, -0.1], LadderError),
        ([0.5, 0.25, 0.1], EpsilonBelowFloorError),
    ],
)
def test_invalid_ladder(coarse_grid: Grid, ladder: list, error: type):
    """
    Test case for rejected ladders on a grid with floor 4h = 0.25.

    Args:
        coarse_grid (fixture): 64 x 64 grid.
        ladder (list): Candidate eps values.
        error (type): Expected exception.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    with pytest.raises(error):
        content.validate_ladder(ladder, coarse_grid)


def test_extrapolate_linear_curve():
    """
    Test case for the linear fit: intercept, slope and brackets.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    ladder = [0.5, 0.25, 0.125]
    estimate = content.extrapolate(_curve(ladder, [4.0 - eps for eps in ladder]))

    assert estimate.value == pytest.approx(4.0)
    assert estimate.slope == pytest.approx(-1.0)
    assert estimate.residual == pytest.approx(0.0, abs=1e-12)
    assert estimate.converged
    assert estimate.lower == pytest.approx(3.5)
    assert estimate.upper == pytest.approx(4.0)
    assert estimate.limit_lower == pytest.approx(3.875)
    assert estimate.limit_upper == pytest.approx(4.0)


def test_extrapolate_brackets_span_whole_tail():
    """
    Test case for brackets of a curved tail: min and max over all fitted values.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    ladder = [0.4, 0.2, 0.1, 0.05]
    estimate = content.extrapolate(_curve(ladder, [7.3, 7.2, 7.1, 7.05]))

    assert estimate.value == pytest.approx(7.0304348, rel=1e-6)
    assert estimate.lower == pytest.approx(estimate.value)
    assert estimate.upper == pytest.approx(7.3)
    assert estimate.limit_lower == pytest.approx(estimate.value)
    assert estimate.limit_upper == pytest.approx(7.05)
    assert estimate.lower <= estimate.value <= estimate.upper


def test_extrapolate_flags_diverging_curve():
    ladder = [0.5, 0.25, 0.125, 0.0625]
    estimate = content.extrapolate(_curve(ladder, [1.0 / eps for eps in ladder]))

    assert not estimate.converged


def test_extrapolate_needs_three_points():
    with pytest.raises(TooFewPointsError):
        content.extrapolate(_curve([0.5, 0.25], [1.0, 1.0]))


def test_verdict():
    estimate = content.extrapolate(_curve([0.5, 0.25, 0.125], [2.0, 2.0, 2.0]))

    assert content.verdict(estimate, 2.01, 0.03, 0.0)
    assert not content.verdict(estimate, 3.0, 0.03, 0.0)
    assert not content.verdict(estimate, math.inf, 0.03, 0.0)


@pytest.mark.parametrize(
    "functional, target, which, value, exists",
    [
        (Functional.SM, ContentTarget.SET, Subject.E, 4.0, False),
        (Functional.M, ContentTarget.TOPOLOGICAL, Subject.E, 3.0, False),
        (Functional.M, ContentTarget.REDUCED, Subject.E, 2.0, True),
        (Functional.FRAK_M, ContentTarget.REDUCED, Subject.E, 2.0, True),
        (Functional.SCRIPT_M, ContentTarget.SET, Subject.E, 3.0, False),
        (Functional.SM, ContentTarget.SET, Subject.DENSITY_ONE, 2.0, True),
        (Functional.SM, ContentTarget.SET, Subject.COMPLEMENT_DENSITY_ZERO, 2.0, True),
        (Functional.SM, ContentTarget.SET, Subject.COMPLEMENT, 2.0, True),
    ],
)
def test_exact_curve_records(
    content_service: ContentService,
    interval_point: shapes.Shape,
    line_domain: shapes.Domain,
    unit_interval: ConvexBody,
    functional: Functional,
    target: ContentTarget,
    which: Subject,
    value: float,
    exists: bool,
):
    """
    Test case for exact curves of [0, 1] u {2} with the body [-1, 1].

    The isolated point adds diam(C) to the outer content and one half of it
    to the content of the topological boundary, so only the reduced and
    density representatives reach the perimeter.

    Args:
        content_service (fixture): Content service.
        interval_point (fixture): The set [0, 1] u {2}.
        line_domain (fixture): Domain with window [-1, 3].
        unit_interval (fixture): The body [-1, 1].
        functional (Functional): The content functional.
        target (ContentTarget): Set or boundary target.
        which (Subject): Side of E the curve runs on.
        value (float): Exact limit.
        exists (bool): Whether the limit matches its target.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    record = content_service.curve_record(
        functional, interval_point, line_domain, unit_interval, EXACT_LADDER, target, which
    )

    assert record.spacing is None
    assert record.values == pytest.approx([value] * len(EXACT_LADDER), abs=1e-12)
    assert record.estimate.value == pytest.approx(value, abs=1e-9)
    assert record.exists is exists


def test_representatives_share_outer_content(
    content_service: ContentService, line_domain: shapes.Domain, unit_interval: ConvexBody
):
    open_ = shapes.intervals([(0.0, 1.0, False, False)])
    half_open = shapes.intervals([(0.0, 1.0, True, False)])
    closed = shapes.intervals([(0.0, 1.0)])

    for eps in EXACT_LADDER:
        values = {
            content_service.sm_eps(shape, line_domain, unit_interval, eps)
            for shape in (open_, half_open, closed)
        }
        assert values == {2.0}


def test_relation_report_one_dimensional(
    content_service: ContentService,
    interval_point: shapes.Shape,
    line_domain: shapes.Domain,
    unit_interval: ConvexBody,
    skew_interval: ConvexBody,
):
    """
    Test case for the relation flags of [0, 1] u {2}.

    Args:
        content_service (fixture): Content service.
        interval_point (fixture): The set [0, 1] u {2}.
        line_domain (fixture): Domain with window [-1, 3].
        unit_interval (fixture): The body [-1, 1].
        skew_interval (fixture): The body [-1, 2].

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    report = content_service.relation_report(
        interval_point, line_domain, [unit_interval, skew_interval], EXACT_LADDER
    )
    unit = report.bodies[0]

    assert report.closure_inside
    assert unit.perimeter_outward == unit.perimeter_inward == unit.half_sum == 2.0
    assert unit.lower_bound_outer
    assert unit.lower_bound_boundary
    assert unit.chain_holds
    assert unit.coincidence
    assert unit.outer_formula
    assert unit.representative_minimum
    assert report.bodies[1].half_sum == 3.0
    assert report.agreement["M:reduced"]
    assert len(report.curves) == 2 * len(content.RELATION_CURVES)

    sandwich = report.sandwiches[0]
    assert (sandwich.lower_factor, sandwich.upper_factor) == (1.0, 2.0)
    assert all(record.holds for record in report.sandwiches)


def test_relation_report_rejects_empty_ladder(
    content_service: ContentService,
    interval_point: shapes.Shape,
    line_domain: shapes.Domain,
    unit_interval: ConvexBody,
):
    with pytest.raises(LadderError):
        content_service.relation_report(interval_point, line_domain, [unit_interval], [])


def test_closure_inside_open_region(content_service: ContentService):
    domain = shapes.Domain.create([-1.0], [3.0], shapes.intervals([(-0.5, 1.5, False, False)]))

    assert content_service.closure_inside(shapes.intervals([(0.0, 1.0)]), domain)
    assert not content_service.closure_inside(
        shapes.intervals([(0.0, 1.0), (2.0, 2.0)]), domain
    )


@pytest.mark.parametrize("name, expected", [("ball1", 4.0), ("triangle", 6.0)])
def test_planar_boundary_content(
    seeded_service: ContentService,
    unit_square: shapes.Shape,
    plane_domain: shapes.Domain,
    bodies: dict[str, ConvexBody],
    name: str,
    expected: float,
):
    """
    Test case for the content of the unit square's boundary on a 128-cell grid.

    Args:
        seeded_service (fixture): Content service with seeded dilation.
        unit_square (fixture): The unit square.
        plane_domain (fixture): Whole-plane domain.
        bodies (fixture): The standard bodies.
        name (str): Body id.
        expected (float): The half-sum of both anisotropic perimeters.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    record = seeded_service.curve_record(
        Functional.M,
        unit_square,
        plane_domain,
        bodies[name],
        PLANAR_LADDER,
        ContentTarget.TOPOLOGICAL,
    )

    assert record.spacing == pytest.approx(1 / 32)
    assert record.target_value == pytest.approx(expected)
    assert record.estimate.value == pytest.approx(expected, rel=0.02)
    assert record.exists


def test_voxel_contents(unit_square: shapes.Shape, plane_domain: shapes.Domain, coarse_grid):
    """
    Test case for contents of a voxel set with a square body at the raster floor.

    Args:
        unit_square (fixture): The unit square.
        plane_domain (fixture): Whole-plane domain.
        coarse_grid (fixture): 64 x 64 grid, h = 1/16.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    service = ContentService()
    voxels = raster.rasterize(unit_square, coarse_grid)
    body = convex.make_box([-1.0, -1.0], [1.0, 1.0], "box")

    assert service.sm_eps(voxels, plane_domain, body, 0.25) == pytest.approx(5.0)
    assert service.m_eps(voxels, plane_domain, body, 0.25) == pytest.approx(4.5)
    assert service.frak_m_eps(voxels, plane_domain, body, 0.25) == pytest.approx(4.5)
    assert service.script_m_eps(voxels, plane_domain, body, 0.25) == pytest.approx(4.0)

    with pytest.raises(EpsilonBelowFloorError):
        service.sm_eps(voxels, plane_domain, body, 0.1)
    with pytest.raises(UnsupportedTargetError):
        service.m_eps(voxels, plane_domain, body, 0.25, ContentTarget.TOPOLOGICAL)


@pytest.mark.parametrize("factor", [0.5, 2.0])
def test_content_scales_with_body(
    content_service: ContentService,
    interval_point: shapes.Shape,
    line_domain: shapes.Domain,
    unit_interval: ConvexBody,
    skew_interval: ConvexBody,
    unit_square: shapes.Shape,
    plane_domain: shapes.Domain,
    coarse_grid: Grid,
    bodies: dict[str, ConvexBody],
    factor: float,
):
    """
    Test case for m_eps with a scaled body against m_eps at the scaled eps.

    Dilating by eps * (a C) is dilating by (a eps) * C, so the contents differ
    by the factor a alone. Factors and scales are powers of two, so both
    sides are computed without rounding.

    Args:
        content_service (fixture): Content service.
        interval_point (fixture): The set [0, 1] u {2}.
        line_domain (fixture): Domain with window [-1, 3].
        unit_interval (fixture): The body [-1, 1].
        skew_interval (fixture): The body [-1, 2].
        unit_square (fixture): The unit square.
        plane_domain (fixture): Whole-plane domain.
        coarse_grid (fixture): 64 x 64 grid, h = 1/16.
        bodies (fixture): The standard bodies.
        factor (float): Scale factor a.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    for body in (unit_interval, skew_interval):
        scaled = convex.scale(body, factor)
        for eps in EXACT_LADDER[1:]:
            assert content_service.m_eps(
                interval_point, line_domain, scaled, eps
            ) == factor * content_service.m_eps(interval_point, line_domain, body, factor * eps)

    voxels = raster.rasterize(unit_square, coarse_grid)
    for body in (bodies["square"], bodies["triangle"]):
        scaled = convex.scale(body, factor)
        for eps in [e for e in (0.25, 0.5, 1.0) if 0.25 <= factor * e <= 0.5]:
            assert content_service.m_eps(
                voxels, plane_domain, scaled, eps
            ) == factor * content_service.m_eps(voxels, plane_domain, body, factor * eps)


def test_evaluate_rejects_mismatches(
    content_service: ContentService,
    interval_point: shapes.Shape,
    line_domain: shapes.Domain,
    unit_interval: ConvexBody,
    bodies: dict[str, ConvexBody],
):
    with pytest.raises(DimensionMismatchError):
        content_service.sm_eps(interval_point, line_domain, bodies["square"], 0.25)
    with pytest.raises(UnsupportedTargetError):
        content_service.evaluate(
            Functional.SM,
            interval_point,
            line_domain,
            unit_interval,
            0.25,
            ContentTarget.TOPOLOGICAL,
        )


def test_layer_tolerances(content_service: ContentService, coarse_grid: Grid):
    assert content_service.layer_tolerances([3.0], [0.25], None) == pytest.approx([3e-12])
    assert content_service.layer_tolerances([4.0], [0.25], coarse_grid) == pytest.approx([2.0])
