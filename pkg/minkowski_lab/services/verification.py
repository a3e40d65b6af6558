"""Built-in acceptance matrix run by the `verify` command."""

import math
from typing import Callable, Iterator, Optional

import numpy as np
import pandas as pd

from minkowski_lab import schemas
from minkowski_lab.config import settings
from minkowski_lab.data.bodies import standard_bodies
from minkowski_lab.data.scenarios import get_scenario
from minkowski_lab.logger import get_logger
from minkowski_lab.models import ConvexBody, Grid, VoxelSet
from minkowski_lab.services import boundary, convex, raster, shapes
from minkowski_lab.services.scenarios import ResolvedScenario, ScenarioService
from minkowski_lab.utils.enums import (
    ContentTarget,
    DensityClass,
    DistanceMethod,
    Functional,
    Orientation,
    RasterMode,
    Subject,
    VoxelLabel,
)
from minkowski_lab.utils.log_messages import PROPERTY_FAILED

logger = get_logger(__name__)

MODULES = ("convex", "shapes", "raster", "content", "boundary")
PROPERTY_TOLERANCE = 1e-9
QUADRATURE_TOLERANCE = 1e-6
MATRIX = ("annulus", "disc_square", "unit_square", "segment", "interval_point")

Checks = Iterator[schemas.CheckResult]


def _close(value: float, goal: float, rel: float, absolute: float = 0.0) -> bool:
    return abs(value - goal) <= max(rel * abs(goal), absolute)


class VerificationService:
    """
    Runs the acceptance matrix module by module.

    Every check belongs to a module and a group; a filter selects either.
    Raster checks use their own tolerance unless `rel_tol` overrides it,
    exact one-dimensional checks always use the exact tolerance.

    Args:
        rel_tol: Override of every raster tolerance.
        grid: Override of the scenario grids.
        name_filter: Module or group name to run alone.
    """

    def __init__(
        self,
        rel_tol: Optional[float] = None,
        grid: Optional[int] = None,
        name_filter: Optional[str] = None,
    ):
        self.rel_tol = rel_tol
        self.grid = grid
        self.name_filter = name_filter
        self._runs: dict[str, ResolvedScenario] = {}

    def groups(self) -> list[tuple[str, str, Callable[[], Checks]]]:
        return [
            ("convex", "duality", self.convex_properties),
            ("shapes", "perimeters", self.perimeters),
            ("raster", "stencil_oracle", self.stencil_oracle),
            ("raster", "chamfer", self.chamfer_excess),
            ("content", "annulus", self.annulus),
            ("content", "disc_square", self.disc_square),
            ("content", "unit_square", self.unit_square),
            ("content", "segment", self.segment),
            ("content", "exact_1d", self.exact_1d),
            ("content", "chain", self.chain),
            ("content", "lower_bounds", self.lower_bounds),
            ("boundary", "densities", self.densities),
            ("boundary", "voxel_labels", self.voxel_labels),
            ("boundary", "reduced_boundary", self.reduced_boundaries),
        ]

    def run(self) -> schemas.SuiteReport:
        """
        Runs every selected group.

        Returns:
            schemas.SuiteReport: One result per check.

        Raises:
            ValueError: If the filter names no module or group.
        """

        selected = [
            (module, group, method)
            for module, group, method in self.groups()
            if self.name_filter in (None, module, group)
        ]
        if not selected:
            raise ValueError(f"Unknown check filter '{self.name_filter}'")

        checks = []
        for module, group, method in selected:
            logger.info("Running %s checks: %s", module, group)
            checks.extend(method())
        report = schemas.SuiteReport(checks=checks)
        logger.info(
            "%s checks run, %s failed", len(report.checks), len(report.failures)
        )
        return report

    @staticmethod
    def table(report: schemas.SuiteReport) -> str:
        frame = pd.DataFrame(
            [check.model_dump() for check in report.checks],
            columns=["module", "name", "passed", "detail"],
        )
        frame["passed"] = frame["passed"].map({True: "PASS", False: "FAIL"})
        return frame.to_string(index=False)

    # helpers

    def _tolerance(self, default: float) -> float:
        return default if self.rel_tol is None else self.rel_tol

    def _check(
        self, module: str, name: str, passed: bool, detail: str = ""
    ) -> schemas.CheckResult:
        if not passed:
            logger.warning(PROPERTY_FAILED, name, detail)
        return schemas.CheckResult(
            module=module, name=name, passed=bool(passed), detail=detail
        )

    def _run(self, name: str) -> ResolvedScenario:
        if name not in self._runs:
            scenario = schemas.Scenario.model_validate(get_scenario(name))
            options = schemas.RunOptions(grid=self.grid, rel_tol=self.rel_tol)
            self._runs[name] = ScenarioService(options).resolve(scenario)
        return self._runs[name]

    def _record(
        self,
        run: ResolvedScenario,
        functional: Functional,
        body: ConvexBody,
        target: ContentTarget = ContentTarget.SET,
        which: Subject = Subject.E,
    ) -> schemas.CurveRecord:
        return run.service.curve_record(
            functional, run.shape, run.domain, body, run.ladder, target, which
        )

    # convex

    def convex_properties(self) -> Checks:
        """Support, gauge and polar identities on random directions."""
        rng = np.random.default_rng(settings.random_seed)
        count = settings.verify_directions
        tol = PROPERTY_TOLERANCE
        bodies = standard_bodies()

        for name, body in bodies.items():
            x = rng.normal(size=(count, body.dimension))
            y = rng.normal(size=(count, body.dimension))
            t = rng.uniform(0.1, 10.0, size=count)
            hx = convex.support(body, x)
            hy = convex.support(body, y)

            excess = convex.support(body, x + y) - hx - hy
            yield self._check(
                "convex",
                f"sublinearity[{name}]",
                bool(np.all(excess <= tol * (1 + np.abs(hx) + np.abs(hy)))),
                f"max excess {excess.max():.3g}",
            )

            scaled = convex.support(body, t[:, None] * x)
            gap = np.abs(scaled - t * hx)
            yield self._check(
                "convex",
                f"homogeneity[{name}]",
                bool(np.all(gap <= tol * t * (1 + np.abs(hx)))),
                f"max gap {gap.max():.3g}",
            )

            gauge = convex.gauge(body, x)
            dual = np.abs(gauge - convex.support(convex.polar(body), x))
            yield self._check(
                "convex",
                f"gauge_support_duality[{name}]",
                bool(np.all(dual <= tol * (1 + np.abs(gauge)))),
                f"max gap {dual.max():.3g}",
            )

            distance = convex.vertex_hausdorff(convex.polar(convex.polar(body)), body)
            yield self._check(
                "convex",
                f"polar_involution[{name}]",
                distance <= tol,
                f"vertex Hausdorff {distance:.3g}",
            )

            a, b = convex.containment_constants(body)
            norms = np.linalg.norm(y, axis=1)
            inside = np.all(a * hy <= norms * (1 + tol)) and np.all(
                norms <= b * hy * (1 + tol)
            )
            yield self._check(
                "convex",
                f"containment[{name}]",
                bool(inside),
                f"a={a:.6g} b={b:.6g}",
            )

        for first, second in (("ball1", "ball2"), ("square", "triangle"), ("cross", "square")):
            total = convex.minkowski_sum(bodies[first], bodies[second])
            y = rng.normal(size=(count, 2))
            expected = convex.support(bodies[first], y) + convex.support(bodies[second], y)
            gap = np.abs(convex.support(total, y) - expected)
            yield self._check(
                "convex",
                f"support_additivity[{first}+{second}]",
                bool(np.all(gap <= tol * (1 + np.abs(expected)))),
                f"max gap {gap.max():.3g}",
            )

    # shapes

    def perimeters(self) -> Checks:
        bodies = standard_bodies()
        square = shapes.box([0.0, 0.0], [1.0, 1.0])
        disc = shapes.ball([0.0, 0.0], 1.0)
        plane = shapes.Domain.create([-2.0, -2.0], [2.0, 2.0])
        exact = settings.exact_tolerance

        cases = [
            ("perimeter[unit_square]", shapes.perimeter(square, plane), 4.0, exact),
            (
                "anisotropic_perimeter[unit_square,triangle]",
                shapes.anisotropic_perimeter(square, plane, bodies["triangle"]),
                6.0,
                exact,
            ),
            (
                "inward_perimeter[unit_square,triangle]",
                shapes.anisotropic_perimeter(
                    square, plane, bodies["triangle"], Orientation.INWARD
                ),
                6.0,
                exact,
            ),
            (
                "perimeter[disc]",
                shapes.perimeter(disc, plane),
                2 * math.pi,
                QUADRATURE_TOLERANCE,
            ),
            (
                "anisotropic_perimeter[disc,square]",
                shapes.anisotropic_perimeter(disc, plane, bodies["square"]),
                8.0,
                QUADRATURE_TOLERANCE,
            ),
        ]
        for name, value, goal, tol in cases:
            yield self._check(
                "shapes", name, _close(value, goal, tol), f"{value:.12g} vs {goal:.12g}"
            )

        annulus = self._run("annulus")
        inside = shapes.perimeter(annulus.shape, annulus.domain)
        yield self._check(
            "shapes",
            "perimeter_inside_domain[annulus]",
            inside == 0.0,
            f"{inside:.6g} (both circles lie on the domain boundary)",
        )

    # raster

    def _raster_cases(self) -> Iterator[tuple[str, VoxelSet, ConvexBody]]:
        plane = Grid.covering([-2.0, -2.0], [2.0, 2.0], 64)
        line = Grid.covering([-2.0], [2.0], 64)
        bodies = standard_bodies()
        planar = {
            "disc": shapes.ball([0.3, -0.2], 0.7),
            "points": shapes.points([[0.5, 0.5], [-1.0, 0.25]]),
            "slit": shapes.segments([[[-1.0, -1.0], [1.0, 0.5]]]),
        }
        for seed_name, seed in planar.items():
            voxels = raster.rasterize(seed, plane, RasterMode.SUPERCOVER)
            for body_name, body in bodies.items():
                yield f"{seed_name},{body_name}", voxels, body

        seed = shapes.intervals([(0.0, 1.0), (1.5, 1.5)])
        voxels = raster.rasterize(seed, line, RasterMode.SUPERCOVER)
        for body in (
            convex.make_interval(-1.0, 1.0, "unit"),
            convex.make_interval(-1.0, 2.0, "skew"),
        ):
            yield f"interval_point,{body.name}", voxels, body

    def stencil_oracle(self) -> Checks:
        """Stencil dilation equals the thresholded brute distance field bit for bit."""
        for name, voxels, body in self._raster_cases():
            field = raster.distance_field(voxels, body, DistanceMethod.BRUTE)
            mismatches = 0
            for cells in (2.5, 6.0):
                eps = cells * voxels.grid.spacing
                stencil = raster.build_stencil(body, eps, voxels.grid)
                dilated = raster.dilate(voxels, stencil)
                thresholded = raster.threshold_below(field, eps)
                mismatches += int(np.count_nonzero(dilated.mask != thresholded.mask))
            yield self._check(
                "raster",
                f"stencil_equals_brute[{name}]",
                mismatches == 0,
                f"{mismatches} cells differ",
            )

    def chamfer_excess(self) -> Checks:
        tol = self._tolerance(0.03)
        for name, voxels, body in self._raster_cases():
            if body.name not in ("ball1", "square", "unit", "skew"):
                continue
            brute = raster.distance_field(voxels, body, DistanceMethod.BRUTE).values
            chamfer = raster.distance_field(voxels, body, DistanceMethod.CHAMFER, 3).values
            positive = brute > 0
            excess = float(np.max((chamfer[positive] - brute[positive]) / brute[positive]))
            sound = bool(np.all(chamfer >= brute * (1 - 1e-12)))
            yield self._check(
                "raster",
                f"chamfer_excess[{name}]",
                sound and excess <= tol,
                f"max relative excess {excess:.4g}, sound={sound}",
            )

    # content

    def annulus(self) -> Checks:
        run = self._run("annulus")
        body = run.bodies["ball1"]
        tol = self._tolerance(0.03)
        frak = self._record(run, Functional.FRAK_M, body, ContentTarget.TOPOLOGICAL)
        script = self._record(run, Functional.SCRIPT_M, body)
        m_top = self._record(run, Functional.M, body, ContentTarget.TOPOLOGICAL)
        yield self._check(
            "content",
            "annulus_frak_m",
            _close(frak.estimate.value, 4 * math.pi, tol),
            f"{frak.estimate.value:.6g} vs {4 * math.pi:.6g}",
        )
        yield self._check(
            "content",
            "annulus_script_m",
            _close(script.estimate.value, 2 * math.pi, tol),
            f"{script.estimate.value:.6g} vs {2 * math.pi:.6g}",
        )
        yield self._check(
            "content",
            "annulus_m",
            abs(m_top.estimate.value) <= 0.15,
            f"{m_top.estimate.value:.6g} vs at most 0.15",
        )

    def disc_square(self) -> Checks:
        run = self._run("disc_square")
        body = run.bodies["square"]
        record = self._record(run, Functional.SM, body)
        yield self._check(
            "content",
            "disc_square_sm",
            _close(record.estimate.value, 8.0, self._tolerance(0.02))
            and _close(record.target_value, 8.0, QUADRATURE_TOLERANCE),
            f"{record.estimate.value:.6g} vs {record.target_value:.6g}",
        )

    def unit_square(self) -> Checks:
        run = self._run("unit_square")
        tol = self._tolerance(0.02)
        verdicts = []
        for body_id, goal in (("ball1", 4.0), ("triangle", 6.0)):
            record = self._record(
                run, Functional.M, run.bodies[body_id], ContentTarget.TOPOLOGICAL
            )
            verdicts.append(record.exists)
            yield self._check(
                "content",
                f"unit_square_m[{body_id}]",
                _close(record.estimate.value, goal, tol),
                f"{record.estimate.value:.6g} vs {goal:.6g}",
            )
        yield self._check(
            "content",
            "unit_square_verdict_agreement",
            len(set(verdicts)) == 1,
            f"verdicts {verdicts}",
        )

    def segment(self) -> Checks:
        run = self._run("segment")
        record = self._record(run, Functional.M, run.bodies["square"])
        yield self._check(
            "content",
            "segment_m",
            _close(record.estimate.value, 2.0, self._tolerance(0.03)),
            f"{record.estimate.value:.6g} vs 2, target {record.target_value:.6g}",
        )

    def exact_1d(self) -> Checks:
        """Exact one-dimensional values; never affected by the tolerance override."""
        run = self._run("interval_point")
        body = run.bodies["unit"]
        exact = settings.exact_tolerance

        def same(value: float, goal: float) -> bool:
            return abs(value - goal) <= exact * max(1.0, abs(goal))

        outer = self._record(run, Functional.SM, body)
        yield self._check(
            "content", "exact_sm", same(outer.estimate.value, 4.0), f"{outer.estimate.value!r}"
        )

        reduced = self._record(run, Functional.M, body, ContentTarget.REDUCED)
        half = shapes.half_sum_target(run.shape, run.domain, body)
        yield self._check(
            "content",
            "exact_m_reduced_boundary",
            same(reduced.estimate.value, 2.0) and same(half, 2.0),
            f"{reduced.estimate.value!r}, half-sum {half!r}",
        )

        topological = self._record(run, Functional.M, body, ContentTarget.TOPOLOGICAL)
        yield self._check(
            "content",
            "exact_m_topological_mismatch",
            same(topological.estimate.value, 3.0) and not topological.exists,
            f"{topological.estimate.value!r} against target {topological.target_value!r}",
        )

        values = []
        for closed_lo, closed_hi in ((False, False), (True, False), (True, True)):
            piece = shapes.intervals([(0.0, 1.0, closed_lo, closed_hi)])
            values.extend(
                run.service.sm_eps(piece, run.domain, body, eps) for eps in run.ladder
            )
        yield self._check(
            "content",
            "exact_representative_invariance",
            all(same(value, 2.0) for value in values),
            f"values {sorted(set(values))}",
        )

        one = self._record(run, Functional.SM, body, which=Subject.DENSITY_ONE)
        zero = self._record(run, Functional.SM, body, which=Subject.COMPLEMENT_DENSITY_ZERO)
        yield self._check(
            "content",
            "exact_representative_minimum",
            same(one.estimate.value, 2.0) and same(zero.estimate.value, 2.0),
            f"{one.estimate.value!r}, {zero.estimate.value!r}",
        )

        skew = convex.make_interval(-1.0, 2.0, "skew")
        point = shapes.intervals([(0.0, 0.0)])
        values = [run.service.sm_eps(point, run.domain, skew, eps) for eps in run.ladder]
        goal = convex.diameter(skew)
        yield self._check(
            "content",
            "exact_point_outer_content",
            same(goal, 3.0) and all(same(value, goal) for value in values),
            f"values {sorted(set(values))}, diameter {goal!r}",
        )

    def chain(self) -> Checks:
        """FrakM >= ScriptM >= M at every ladder point of every matrix case."""
        for name in MATRIX:
            run = self._run(name)
            for body in run.bodies.values():
                frak = self._record(run, Functional.FRAK_M, body, ContentTarget.TOPOLOGICAL)
                script = self._record(run, Functional.SCRIPT_M, body)
                m_top = self._record(run, Functional.M, body, ContentTarget.TOPOLOGICAL)
                slack = run.service.layer_tolerances(frak.values, frak.ladder, run.grid)
                holds = all(
                    f >= s - tol and s >= m - tol
                    for f, s, m, tol in zip(frak.values, script.values, m_top.values, slack)
                )
                yield self._check(
                    "content",
                    f"fixed_eps_chain[{name},{body.name}]",
                    holds,
                    f"FrakM {frak.values[-1]:.6g} ScriptM {script.values[-1]:.6g} "
                    f"M {m_top.values[-1]:.6g} at the finest eps",
                )

    def lower_bounds(self) -> Checks:
        for name in MATRIX:
            run = self._run(name)
            exact = run.grid is None
            tol = 0.0 if exact else self._tolerance(run.service.lower_bound_tol)
            slack = settings.exact_tolerance
            for body in run.bodies.values():
                outward = shapes.anisotropic_perimeter(run.shape, run.domain, body)
                half = shapes.half_sum_target(run.shape, run.domain, body)
                outer = self._record(run, Functional.SM, body).estimate.limit_lower
                m_top = self._record(run, Functional.M, body, ContentTarget.TOPOLOGICAL)
                m_red = self._record(run, Functional.M, body, ContentTarget.REDUCED)
                top, red = m_top.estimate.limit_lower, m_red.estimate.limit_lower
                holds = (
                    outer >= outward * (1 - tol) - slack
                    and top >= half * (1 - tol) - slack
                    and red >= half * (1 - tol) - slack
                )
                yield self._check(
                    "content",
                    f"lower_bounds[{name},{body.name}]",
                    holds,
                    f"SM {outer:.6g}/{outward:.6g}, M {top:.6g},{red:.6g}/{half:.6g}",
                )

    # boundary

    def densities(self) -> Checks:
        line = shapes.intervals([(0.0, 1.0), (2.0, 2.0)])
        square = shapes.box([0.0, 0.0], [1.0, 1.0])
        cases = [
            ("interior", line, [0.5], DensityClass.DENSITY1, 1.0),
            ("endpoint", line, [0.0], DensityClass.HALF, 0.5),
            ("isolated_point", line, [2.0], DensityClass.DENSITY0, 0.0),
            ("square_edge", square, [0.5, 0.0], DensityClass.HALF, 0.5),
            ("square_corner", square, [0.0, 0.0], DensityClass.OTHER, 0.25),
        ]
        for name, shape, point, expected, value in cases:
            estimate = boundary.density_estimate(shape, point)
            yield self._check(
                "boundary",
                f"density[{name}]",
                estimate.classification == expected
                and abs(estimate.density - value) <= PROPERTY_TOLERANCE,
                f"{estimate.density:.6g} classified {estimate.classification.value}",
            )

        run = self._run("interval_point")
        body = run.bodies["unit"]
        prediction = boundary.outer_content_prediction(run.shape, run.domain, body)
        outer = self._record(run, Functional.SM, body)
        yield self._check(
            "boundary",
            "outer_content_formula",
            abs(prediction - outer.estimate.value)
            <= settings.exact_tolerance * max(1.0, prediction),
            f"prediction {prediction!r}, estimate {outer.estimate.value!r}",
        )

    def voxel_labels(self) -> Checks:
        grid = Grid.covering([-1.5, -1.5], [2.5, 2.5], 64)
        voxels = raster.rasterize(shapes.box([0.0, 0.0], [1.0, 1.0]), grid)
        labels = boundary.classify_voxels(voxels, [2.0, 3.0, 4.0]).labels
        probes = np.array([[0.5, 0.5], [-1.0, -1.0], [grid.spacing / 2, 0.5]])
        indices, _ = grid.index_of(probes)
        found = [VoxelLabel(int(labels[tuple(index)])) for index in indices]
        expected = [VoxelLabel.E1, VoxelLabel.E0, VoxelLabel.ESSENTIAL]
        yield self._check(
            "boundary",
            "voxel_labels[unit_square]",
            found == expected,
            ", ".join(label.name for label in found),
        )

    def reduced_boundaries(self) -> Checks:
        run = self._run("interval_point")
        mesh = boundary.reduced_boundary(run.shape, run.domain)
        points = sorted(float(v) for v in mesh.vertices[:, 0, 0])
        normals = [float(v) for v in mesh.normals[np.argsort(mesh.vertices[:, 0, 0]), 0]]
        yield self._check(
            "boundary",
            "reduced_boundary[interval_point]",
            points == [0.0, 1.0] and normals == [-1.0, 1.0],
            f"points {points}, normals {normals}",
        )

        annulus = self._run("annulus")
        inside = boundary.reduced_boundary(annulus.shape, annulus.domain)
        yield self._check(
            "boundary",
            "reduced_boundary[annulus]",
            inside.is_empty,
            f"{inside.facet_count} facets inside the domain",
        )
