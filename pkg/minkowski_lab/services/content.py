"""Content functionals at fixed eps, eps ladders, extrapolation and relation reports.

Rasters see a set through cell centres. Shapes are dilated either by
seeds (exact centre membership in boundary segments plus eps*C, n = 2) or
by a supercover raster and a closed stencil; one-dimensional shapes are
evaluated exactly by interval arithmetic.
"""

import math
from typing import Optional, Sequence, Union

import numpy as np

from minkowski_lab import schemas
from minkowski_lab.config import settings
from minkowski_lab.logger import get_logger
from minkowski_lab.models import (
    BoundaryMesh,
    ContentCurve,
    ContentEstimate,
    ConvexBody,
    Grid,
    VoxelSet,
)
from minkowski_lab.services import boundary, convex, raster, shapes
from minkowski_lab.utils.enums import (
    ContentTarget,
    DilationMode,
    Functional,
    Location,
    Orientation,
    Subject,
)
from minkowski_lab.utils.exceptions import (
    DimensionMismatchError,
    EpsilonBelowFloorError,
    LadderError,
    StencilTooLargeError,
    TooFewPointsError,
    UnsupportedTargetError,
    WindowTooSmallError,
)
from minkowski_lab.utils.log_messages import LADDER_POINT, VERDICT_FAILED

logger = get_logger(__name__)

Subjectable = Union[shapes.Shape, VoxelSet]

RELATION_CURVES = (
    (Functional.M, ContentTarget.TOPOLOGICAL, Subject.E),
    (Functional.M, ContentTarget.REDUCED, Subject.E),
    (Functional.FRAK_M, ContentTarget.TOPOLOGICAL, Subject.E),
    (Functional.SCRIPT_M, ContentTarget.SET, Subject.E),
    (Functional.SM, ContentTarget.SET, Subject.E),
    (Functional.SM, ContentTarget.SET, Subject.COMPLEMENT),
    (Functional.SM, ContentTarget.SET, Subject.DENSITY_ONE),
    (Functional.SM, ContentTarget.SET, Subject.COMPLEMENT_DENSITY_ZERO),
)


def default_ladder(
    grid: Optional[Grid] = None,
    eps_max: Optional[float] = None,
    points: Optional[int] = None,
) -> list[float]:
    """
    Geometric ladder eps_max * 2^-k.

    Args:
        grid: Raster grid, or None for the exact engine.
        eps_max: Largest eps; defaults to eps_max_cells * h on rasters and
            exact_eps_max otherwise.
        points: Ladder length.

    Returns:
        list[float]: Strictly decreasing eps values.
    """

    if eps_max is None:
        eps_max = (
            settings.exact_eps_max if grid is None else settings.eps_max_cells * grid.spacing
        )
    points = settings.eps_points if points is None else points
    return [eps_max * 2.0**-k for k in range(points)]


def validate_ladder(ladder: Sequence[float], grid: Optional[Grid] = None) -> list[float]:
    """
    Checks that a ladder is positive, strictly decreasing and above the raster floor.

    Args:
        ladder: The eps values.
        grid: Raster grid, or None for the exact engine.

    Returns:
        list[float]: The ladder as floats.

    Raises:
        LadderError: If the ladder is empty, not positive or not decreasing.
        EpsilonBelowFloorError: If the smallest eps is below eps_floor_cells * h.
    """

    values = [float(eps) for eps in ladder]
    if not values:
        raise LadderError("empty ladder")
    if any(eps <= 0 or not math.isfinite(eps) for eps in values):
        raise LadderError("eps values must be positive and finite")
    if any(b >= a for a, b in zip(values, values[1:])):
        raise LadderError("eps values must be strictly decreasing")
    if grid is not None:
        check_floor(values[-1], grid)
    return values


def check_floor(eps: float, grid: Grid) -> None:
    floor = settings.eps_floor_cells * grid.spacing
    if eps < floor * (1 - 1e-12):
        raise EpsilonBelowFloorError(eps, floor)


def absolute_floor(domain: shapes.Domain, factor: Optional[float] = None) -> float:
    """Existence floor: factor * window volume^((n-1)/n)."""
    factor = settings.abs_floor_factor if factor is None else factor
    n = domain.dimension
    return factor * domain.window_measure ** ((n - 1) / n)


def extrapolate(
    curve: ContentCurve,
    rel_tol: Optional[float] = None,
    bracket_tol: Optional[float] = None,
    abs_floor: float = 0.0,
    points: Optional[int] = None,
) -> ContentEstimate:
    """
    Fits F(eps) = L + c * eps on the smallest eps values of a curve.

    Args:
        curve: The content curve.
        rel_tol: Relative residual tolerance for convergence.
        bracket_tol: Relative spread allowed between the tail and L.
        abs_floor: Absolute scale used when |L| is small.
        points: Number of tail points K.

    Returns:
        ContentEstimate: L, slope, RMS residual, the convergence flag,
        tail brackets (min/max of the K fitted values and L) and limit
        brackets (L and the finest value).

    Raises:
        TooFewPointsError: If the curve has fewer than three points.
    """

    count = len(curve.ladder)
    if count < 3:
        raise TooFewPointsError(count)
    rel_tol = settings.rel_tol if rel_tol is None else rel_tol
    bracket_tol = settings.bracket_tol if bracket_tol is None else bracket_tol
    k = min(count, max(3, settings.extrapolation_points if points is None else points))

    eps = np.asarray(curve.ladder[-k:], dtype=float)
    values = np.asarray(curve.values[-k:], dtype=float)
    slope, value = np.polyfit(eps, values, 1)
    residual = float(np.sqrt(np.mean((values - (value + slope * eps)) ** 2)))

    scale = max(abs(value), abs_floor)
    converged = residual <= rel_tol * scale and bool(
        np.all(np.abs(values - value) <= bracket_tol * scale)
    )
    finest = float(values[-1])
    return ContentEstimate(
        value=float(value),
        slope=float(slope),
        residual=residual,
        lower=float(min(values.min(), value)),
        upper=float(max(values.max(), value)),
        limit_lower=float(min(finest, value)),
        limit_upper=float(max(finest, value)),
        converged=converged,
    )


def target_value(
    functional: Functional,
    shape: shapes.Shape,
    domain: shapes.Domain,
    body: ConvexBody,
    target: ContentTarget = ContentTarget.SET,
    subject: Subject = Subject.E,
) -> float:
    """
    The limit a content curve is expected to reach.

    Outer contents aim at the anisotropic perimeter of their own side,
    two-sided contents of a boundary at the half-sum of both perimeters,
    and the content of a null set at half the symmetric support integral
    over its facets. A full-dimensional set has infinite content.

    Args:
        functional: M, SM, FrakM or ScriptM.
        shape: The set E itself, whatever the subject.
        domain: The domain.
        body: Convex body C.
        target: SET or a boundary target.
        subject: Which side of E the curve was evaluated on.

    Returns:
        float: The target, possibly infinite.
    """

    if functional == Functional.SM:
        orientation = Orientation.INWARD if subject == Subject.COMPLEMENT else Orientation.OUTWARD
        return shapes.anisotropic_perimeter(shape, domain, body, orientation)
    if functional == Functional.SCRIPT_M or target != ContentTarget.SET:
        return shapes.half_sum_target(shape, domain, body)
    if not shape.null_mass:
        return math.inf
    return shapes.symmetric_facet_integral(shapes.boundary_mesh(shape, domain), body)


def verdict(
    estimate: ContentEstimate, target: float, rel_tol: float, abs_floor: float
) -> bool:
    if not estimate.converged or not math.isfinite(target):
        return False
    return abs(estimate.value - target) <= max(rel_tol * abs(target), abs_floor)


class ContentService:
    """
    Evaluates content functionals on shapes and voxel sets.

    Grids, derived shapes and whole curves are memoized per service
    instance, so one service should serve one scenario.

    Args:
        grid_cells: Cells along the longest window axis.
        dilation_mode: SEEDED or STENCIL for two-dimensional shapes.
        rel_tol: Convergence and existence tolerance.
        bracket_tol: Tail spread allowed for convergence.
        lower_bound_tol: Relative slack of the lower-bound flags.
        abs_floor_factor: Existence floor factor.
    """

    def __init__(
        self,
        grid_cells: Optional[int] = None,
        dilation_mode: Optional[Union[str, DilationMode]] = None,
        rel_tol: Optional[float] = None,
        bracket_tol: Optional[float] = None,
        lower_bound_tol: Optional[float] = None,
        abs_floor_factor: Optional[float] = None,
    ):
        self.grid_cells = grid_cells or settings.default_grid
        self.dilation_mode = DilationMode(dilation_mode or settings.dilation_mode)
        self.rel_tol = settings.rel_tol if rel_tol is None else rel_tol
        self.bracket_tol = settings.bracket_tol if bracket_tol is None else bracket_tol
        self.lower_bound_tol = (
            settings.lower_bound_tol if lower_bound_tol is None else lower_bound_tol
        )
        self.abs_floor_factor = (
            settings.abs_floor_factor if abs_floor_factor is None else abs_floor_factor
        )
        self._grids: dict = {}
        self._derived_shapes: dict = {}
        self._curves: dict = {}

    # plumbing

    def grid_for(self, domain: shapes.Domain) -> Grid:
        if domain not in self._grids:
            grid = Grid.covering(domain.window_lo, domain.window_hi, self.grid_cells)
            raster.check_grid(grid)
            self._grids[domain] = grid
        return self._grids[domain]

    def _derived(self, kind: str, shape: Optional[shapes.Shape], domain: shapes.Domain):
        key = (kind, shape, domain)
        if key in self._derived_shapes:
            return self._derived_shapes[key]
        if kind == "region":
            result = domain.region
        elif kind == "restricted":
            result = domain.restricted(shape)
        elif kind == "complement":
            result = shapes.Difference(self._derived("region", None, domain), shape)
        elif kind == "density_one":
            result = boundary.density_one_part(shape)
        else:
            result = shapes.Difference(
                self._derived("region", None, domain), boundary.density_zero_part(shape)
            )
        self._derived_shapes[key] = result
        return result

    def _resolve(self, subject: Subjectable, domain: shapes.Domain, which: Subject):
        if isinstance(subject, VoxelSet):
            if which == Subject.E:
                return subject
            if which == Subject.COMPLEMENT:
                region = raster.center_mask(self._derived("region", None, domain), subject.grid)
                return subject.with_mask(region & ~subject.mask)
            raise UnsupportedTargetError(which.value, "voxel")
        kind = {
            Subject.E: None,
            Subject.COMPLEMENT: "complement",
            Subject.DENSITY_ONE: "density_one",
            Subject.COMPLEMENT_DENSITY_ZERO: "complement_density_zero",
        }[which]
        return subject if kind is None else self._derived(kind, subject, domain)

    def _dilated(
        self, mask: np.ndarray, mesh: BoundaryMesh, grid: Grid, body: ConvexBody, eps: float
    ) -> np.ndarray:
        """Cells of (mask-set union mesh) + eps*C."""
        if self.dilation_mode == DilationMode.SEEDED and grid.dimension == 2:
            seeds = raster.seed_segments(mesh, grid)
            return mask | raster.dilate_seeds(grid, seeds, body, eps)
        stencil = raster.build_stencil(body, eps, grid)
        return raster.dilate_mask(mask | raster.supercover_mask(mesh, grid), stencil.offsets)

    def _dilated_shape(
        self, shape: shapes.Shape, domain: shapes.Domain, grid: Grid, body: ConvexBody, eps: float
    ) -> np.ndarray:
        mask = np.array(raster.center_mask(shape, grid))
        mesh = shapes.boundary_mesh(shape, domain.unclipped)
        return self._dilated(mask, mesh, grid, body, eps)

    def _outer_shape(
        self, shape: shapes.Shape, domain: shapes.Domain, grid: Grid, body: ConvexBody, eps: float
    ) -> float:
        restricted = self._derived("restricted", shape, domain)
        outside = raster.center_mask(self._derived("complement", shape, domain), grid)
        dilated = self._dilated_shape(restricted, domain, grid, body, eps)
        return np.count_nonzero(dilated & outside) * grid.cell_volume / eps

    def _shape_value(
        self,
        functional: Functional,
        shape: shapes.Shape,
        anchor: shapes.Shape,
        domain: shapes.Domain,
        body: ConvexBody,
        eps: float,
        target: ContentTarget,
    ) -> float:
        if shape.dimension == 1:
            return shapes.exact_1d_content(shape, domain, body, functional, target, eps)

        grid = self.grid_for(domain)
        check_floor(eps, grid)
        domain.validate_window(anchor, eps * convex.diameter(body))

        if functional == Functional.SM:
            return self._outer_shape(shape, domain, grid, body, eps)
        if functional == Functional.SCRIPT_M:
            complement = self._derived("complement", shape, domain)
            return 0.5 * (
                self._outer_shape(shape, domain, grid, body, eps)
                + self._outer_shape(complement, domain, grid, body, eps)
            )

        region = raster.center_mask(self._derived("region", None, domain), grid)
        if target == ContentTarget.SET:
            subject = shape if functional == Functional.FRAK_M else self._derived(
                "restricted", shape, domain
            )
            dilated = self._dilated_shape(subject, domain, grid, body, eps)
        else:
            clip = domain if functional == Functional.M else domain.unclipped
            mesh = shapes.boundary_mesh(shape, clip)
            if target == ContentTarget.REDUCED:
                mesh = mesh.reduced_part()
            empty = np.zeros(grid.counts, dtype=bool)
            dilated = self._dilated(empty, mesh, grid, body, eps)
        return np.count_nonzero(dilated & region) * grid.cell_volume / (2 * eps)

    def _voxel_value(
        self,
        functional: Functional,
        voxels: VoxelSet,
        domain: shapes.Domain,
        body: ConvexBody,
        eps: float,
        target: ContentTarget,
    ) -> float:
        if target != ContentTarget.SET:
            raise UnsupportedTargetError(target.value, "voxel")
        grid = voxels.grid
        if domain.dimension != grid.dimension:
            raise DimensionMismatchError(grid.dimension, domain.dimension)
        check_floor(eps, grid)

        region = raster.center_mask(self._derived("region", None, domain), grid)
        offsets = raster.build_stencil(body, eps, grid).offsets
        volume = grid.cell_volume
        mask = voxels.mask

        def outer(inside: np.ndarray) -> float:
            grown = raster.dilate_mask(inside & region, offsets)
            return np.count_nonzero(grown & region & ~inside) * volume / eps

        if functional == Functional.SM:
            return outer(mask)
        if functional == Functional.SCRIPT_M:
            return 0.5 * (outer(mask) + outer(region & ~mask))
        if functional == Functional.M:
            grown = raster.dilate_mask(mask & region, offsets)
        else:
            grown = raster.dilate_mask(mask, offsets)
        return np.count_nonzero(grown & region) * volume / (2 * eps)

    # fixed-eps functionals

    def evaluate(
        self,
        functional: Functional,
        subject: Subjectable,
        domain: shapes.Domain,
        body: ConvexBody,
        eps: float,
        target: ContentTarget = ContentTarget.SET,
        anchor: Optional[shapes.Shape] = None,
    ) -> float:
        """
        Evaluates one content functional at a fixed eps.

        Args:
            functional: M, SM, FrakM or ScriptM.
            subject: A shape or a voxel set.
            domain: The domain (open region and window).
            body: Convex body C.
            eps: Dilation scale.
            target: SET or a boundary target (shapes only; M and FrakM only).
            anchor: Shape whose extent the window check uses; defaults to subject.

        Returns:
            float: The value.

        Raises:
            DimensionMismatchError: If body, subject and domain disagree.
            EpsilonBelowFloorError: If eps is below the raster floor.
            UnsupportedTargetError: If the target does not apply.
            WindowTooSmallError: If the window is too tight for eps*C.
        """

        if body.dimension != domain.dimension:
            raise DimensionMismatchError(domain.dimension, body.dimension)
        one_sided = functional in (Functional.SM, Functional.SCRIPT_M)
        if one_sided and target != ContentTarget.SET:
            raise UnsupportedTargetError(target.value, functional.value)
        if isinstance(subject, VoxelSet):
            return self._voxel_value(functional, subject, domain, body, eps, target)
        if subject.dimension != domain.dimension:
            raise DimensionMismatchError(domain.dimension, subject.dimension)
        return self._shape_value(
            functional, subject, anchor if anchor is not None else subject, domain, body, eps, target
        )

    def m_eps(self, subject, domain, body, eps, target=ContentTarget.SET) -> float:
        """(1/2eps) * volume of ((S n Omega) + eps*C) n Omega."""
        return self.evaluate(Functional.M, subject, domain, body, eps, target)

    def sm_eps(self, subject, domain, body, eps) -> float:
        """(1/eps) * volume of ((E n Omega) + eps*C) n (Omega minus E)."""
        return self.evaluate(Functional.SM, subject, domain, body, eps)

    def frak_m_eps(self, subject, domain, body, eps, target=ContentTarget.SET) -> float:
        """(1/2eps) * volume of (S + eps*C) n Omega; S is not clipped to Omega."""
        return self.evaluate(Functional.FRAK_M, subject, domain, body, eps, target)

    def script_m_eps(self, subject, domain, body, eps) -> float:
        return self.evaluate(Functional.SCRIPT_M, subject, domain, body, eps)

    # curves

    def _grid_of(self, subject: Subjectable, domain: shapes.Domain) -> Optional[Grid]:
        if isinstance(subject, VoxelSet):
            return subject.grid
        return None if subject.dimension == 1 else self.grid_for(domain)

    def content_curve(
        self,
        functional: Functional,
        subject: Subjectable,
        domain: shapes.Domain,
        body: ConvexBody,
        ladder: Sequence[float],
        target: ContentTarget = ContentTarget.SET,
        which: Subject = Subject.E,
    ) -> ContentCurve:
        """
        Evaluates a functional across an eps ladder.

        Args:
            functional: M, SM, FrakM or ScriptM.
            subject: The set E (or S), as a shape or a voxel set.
            domain: The domain.
            body: Convex body C.
            ladder: Strictly decreasing eps values.
            target: SET or a boundary target.
            which: Side of E the curve runs on (E, Omega minus E, E^1, ...).

        Returns:
            ContentCurve: The values per eps.

        Raises:
            LadderError: If the ladder is not strictly decreasing.
            EpsilonBelowFloorError: If the ladder goes below the raster floor.
        """

        ladder = validate_ladder(ladder, self._grid_of(subject, domain))
        resolved = self._resolve(subject, domain, which)
        anchor = None if isinstance(subject, VoxelSet) else subject
        return self._curve(functional, resolved, anchor, domain, body, tuple(ladder), target)

    def _curve(
        self,
        functional: Functional,
        subject: Subjectable,
        anchor: Optional[shapes.Shape],
        domain: shapes.Domain,
        body: ConvexBody,
        ladder: tuple[float, ...],
        target: ContentTarget,
    ) -> ContentCurve:
        key = (functional, target, subject, domain, body, ladder)
        if key in self._curves:
            return self._curves[key]

        logger.info(
            "Evaluating %s(%s) for body %s on %s ladder points",
            functional.value,
            target.value,
            body.name,
            len(ladder),
        )
        if functional == Functional.SCRIPT_M and isinstance(subject, shapes.Shape):
            complement = self._derived("complement", subject, domain)
            inner = self._curve(Functional.SM, subject, anchor, domain, body, ladder, target)
            outer = self._curve(Functional.SM, complement, anchor, domain, body, ladder, target)
            values = tuple(0.5 * (a + b) for a, b in zip(inner.values, outer.values))
        else:
            values = tuple(
                float(self.evaluate(functional, subject, domain, body, eps, target, anchor))
                for eps in ladder
            )
        for eps, value in zip(ladder, values):
            logger.debug(LADDER_POINT, functional.value, target.value, body.name, eps, value)

        grid = self._grid_of(subject, domain)
        curve = ContentCurve(
            functional=functional,
            target=target,
            body_name=body.name,
            spacing=None if grid is None else grid.spacing,
            ladder=ladder,
            values=values,
        )
        self._curves[key] = curve
        return curve

    def curve_record(
        self,
        functional: Functional,
        shape: shapes.Shape,
        domain: shapes.Domain,
        body: ConvexBody,
        ladder: Sequence[float],
        target: ContentTarget = ContentTarget.SET,
        which: Subject = Subject.E,
    ) -> schemas.CurveRecord:
        """
        Builds the report record of one curve: values, estimate, target and verdict.

        Args:
            functional: M, SM, FrakM or ScriptM.
            shape: The set E.
            domain: The domain.
            body: Convex body C.
            ladder: Strictly decreasing eps values.
            target: SET or a boundary target.
            which: Side of E the curve runs on.

        Returns:
            schemas.CurveRecord: The record.
        """

        curve = self.content_curve(functional, shape, domain, body, ladder, target, which)
        floor = absolute_floor(domain, self.abs_floor_factor)
        estimate = extrapolate(curve, self.rel_tol, self.bracket_tol, floor)
        goal = target_value(functional, shape, domain, body, target, which)
        exists = verdict(estimate, goal, self.rel_tol, floor)
        if not exists:
            logger.warning(
                VERDICT_FAILED, functional.value, target.value, body.name, estimate.value, goal
            )
        return schemas.CurveRecord(
            functional=functional,
            target=target,
            subject=which,
            body=body.name,
            spacing=curve.spacing,
            ladder=list(curve.ladder),
            values=list(curve.values),
            estimate=schemas.EstimateRecord.model_validate(estimate),
            target_value=goal,
            exists=exists,
        )

    # relations

    def closure_inside(self, shape: shapes.Shape, domain: shapes.Domain) -> bool:
        """
        Decides whether the closure of E lies inside Omega.

        Args:
            shape: The set E.
            domain: The domain.

        Returns:
            bool: True when the closure of E is inside the open region.
        """

        if domain.is_whole:
            return shape.is_bounded
        if shape.dimension == 1:
            closure = shape.to_interval_set().closure()
            return (closure - domain.region.to_interval_set()).is_empty

        grid = self.grid_for(domain)
        region = self._derived("region", None, domain)
        mesh = shapes.boundary_mesh(shape, domain.unclipped)
        points = mesh.vertices.reshape(-1, shape.dimension)
        on_region = bool(np.all(region.classify(points) == Location.INSIDE)) if len(points) else True
        stray = np.array(raster.center_mask(shape, grid)) & ~raster.center_mask(region, grid)
        return on_region and not stray.any()

    def layer_tolerances(
        self, values: Sequence[float], ladder: Sequence[float], grid: Optional[Grid]
    ) -> list[float]:
        """Slack of fixed-eps comparisons: exact tolerance, or two boundary layers over eps."""
        if grid is None:
            return [settings.exact_tolerance * max(1.0, abs(v)) for v in values]
        return [2 * abs(v) * grid.spacing / eps for v, eps in zip(values, ladder)]

    def _body_relations(
        self,
        shape: shapes.Shape,
        domain: shapes.Domain,
        body: ConvexBody,
        curves: dict,
        grid: Optional[Grid],
        closure_inside: bool,
    ) -> schemas.BodyRelations:
        outward = shapes.anisotropic_perimeter(shape, domain, body, Orientation.OUTWARD)
        inward = shapes.anisotropic_perimeter(shape, domain, body, Orientation.INWARD)
        half = 0.5 * (outward + inward)
        floor = absolute_floor(domain, self.abs_floor_factor)
        exact = grid is None

        def above(record: schemas.CurveRecord, goal: float) -> bool:
            slack = self.lower_bound_tol * abs(goal) + settings.exact_tolerance
            return record.estimate.limit_lower >= goal - slack

        def close(first: float, second: float) -> bool:
            if exact:
                return abs(first - second) <= settings.exact_tolerance * max(1.0, abs(second))
            return abs(first - second) <= self.rel_tol * max(abs(second), floor)

        m_top = curves[RELATION_CURVES[0]]
        m_red = curves[RELATION_CURVES[1]]
        frak = curves[RELATION_CURVES[2]]
        script = curves[RELATION_CURVES[3]]
        outer = curves[RELATION_CURVES[4]]
        one = curves[RELATION_CURVES[6]]
        zero = curves[RELATION_CURVES[7]]

        tolerances = self.layer_tolerances(frak.values, frak.ladder, grid)
        chain = all(
            f >= s - tol and s >= m - tol
            for f, s, m, tol in zip(frak.values, script.values, m_top.values, tolerances)
        )

        coincidence = None
        if closure_inside:
            coincidence = close(frak.estimate.value, m_top.estimate.value) and close(
                script.estimate.value, m_top.estimate.value
            )

        formula = None
        if shape.dimension == 1:
            prediction = boundary.outer_content_prediction(shape, domain, body)
            formula = close(outer.estimate.value, prediction)

        layers = self.layer_tolerances(outer.values, outer.ladder, grid)
        minimum = all(
            abs(first - second) <= tol and first <= own + tol
            for first, second, own, tol in zip(one.values, zero.values, outer.values, layers)
        )

        return schemas.BodyRelations(
            body=body.name,
            perimeter_outward=outward,
            perimeter_inward=inward,
            half_sum=half,
            lower_bound_outer=above(outer, outward),
            lower_bound_boundary=above(m_top, half) and above(m_red, half),
            chain_holds=chain,
            coincidence=coincidence,
            outer_formula=formula,
            representative_minimum=minimum,
        )

    def sandwich(
        self,
        functional: Functional,
        shape: shapes.Shape,
        domain: shapes.Domain,
        inner: ConvexBody,
        outer: ConvexBody,
        eps: float,
    ) -> schemas.SandwichRecord:
        """
        Checks a * F_{a eps, C} <= F_{eps, C'} <= b * F_{b eps, C} at a fixed eps.

        a and b are the tight factors with aC inside C' inside bC. F is the
        content of the topological boundary for M and of E for SM.

        Args:
            functional: M or SM.
            shape: The set E.
            domain: The domain.
            inner: The body C.
            outer: The body C'.
            eps: The scale.

        Returns:
            schemas.SandwichRecord: holds is None when a scaled eps leaves
            the admissible range.
        """

        a = convex.inner_factor(inner, outer)
        b = convex.outer_factor(inner, outer)
        target = ContentTarget.TOPOLOGICAL if functional == Functional.M else ContentTarget.SET
        holds: Optional[bool]
        try:
            low = a * self.evaluate(functional, shape, domain, inner, a * eps, target)
            middle = self.evaluate(functional, shape, domain, outer, eps, target)
            high = b * self.evaluate(functional, shape, domain, inner, b * eps, target)
        except (EpsilonBelowFloorError, WindowTooSmallError, StencilTooLargeError) as error:
            logger.info("Sandwich %s/%s skipped: %s", inner.name, outer.name, error)
            holds = None
        else:
            if shape.dimension == 1:
                tol = settings.exact_tolerance * max(1.0, abs(high))
            else:
                tol = 2 * abs(high) * self.grid_for(domain).spacing / (min(a, 1.0) * eps)
            holds = low <= middle + tol and middle <= high + tol
        return schemas.SandwichRecord(
            functional=functional,
            inner_body=inner.name,
            outer_body=outer.name,
            lower_factor=a,
            upper_factor=b,
            eps=eps,
            holds=holds,
        )

    def relation_report(
        self,
        shape: shapes.Shape,
        domain: shapes.Domain,
        bodies: Sequence[ConvexBody],
        ladder: Optional[Sequence[float]] = None,
    ) -> schemas.RelationReport:
        """
        Runs the relation matrix of a set for every body.

        Args:
            shape: The set E.
            domain: The domain.
            bodies: Convex bodies, each with a distinct name.
            ladder: eps ladder; defaults to the standard ladder.

        Returns:
            schemas.RelationReport: Curves, per-body flags, cross-body
            agreement and sandwich checks.
        """

        grid = None if shape.dimension == 1 else self.grid_for(domain)
        ladder = validate_ladder(default_ladder(grid) if ladder is None else ladder, grid)
        closure_inside = self.closure_inside(shape, domain)
        logger.info(
            "Relation report for %s bodies, closure inside: %s", len(bodies), closure_inside
        )

        records: list[schemas.CurveRecord] = []
        relations: list[schemas.BodyRelations] = []
        verdicts: dict[str, set] = {}
        for body in bodies:
            curves = {
                key: self.curve_record(key[0], shape, domain, body, ladder, key[1], key[2])
                for key in RELATION_CURVES
            }
            records.extend(curves.values())
            relations.append(
                self._body_relations(shape, domain, body, curves, grid, closure_inside)
            )
            for record in curves.values():
                label = f"{record.functional.value}:{record.target_label}"
                verdicts.setdefault(label, set()).add(record.exists)

        sandwiches = [
            self.sandwich(functional, shape, domain, inner, outer, ladder[0])
            for inner, outer in zip(bodies, bodies[1:])
            for functional in (Functional.M, Functional.SM)
        ]
        return schemas.RelationReport(
            curves=records,
            bodies=relations,
            agreement={label: len(values) == 1 for label, values in verdicts.items()},
            closure_inside=closure_inside,
            sandwiches=sandwiches,
        )
