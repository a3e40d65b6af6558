from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import pandas as pd
from pydantic import ValidationError

from minkowski_lab import schemas
from minkowski_lab.logger import get_logger
from minkowski_lab.models import ConvexBody, Grid
from minkowski_lab.services import content, convex, raster, shapes
from minkowski_lab.services.content import ContentService
from minkowski_lab.utils.enums import DistanceMethod, FieldFormat, RasterMode
from minkowski_lab.utils.exceptions import (
    EpsilonBelowFloorError,
    LadderError,
    ScenarioParseError,
    ScenarioValidationError,
)
from minkowski_lab.utils.file_utils import write_atomically

logger = get_logger(__name__)

LADDER_COLUMNS = ["scenario", "functional", "target", "body", "h", "eps", "value"]
SUMMARY_COLUMNS = [
    "scenario",
    "functional",
    "target",
    "body",
    "estimate",
    "lower",
    "upper",
    "target_value",
    "exists_flag",
]


@dataclass(frozen=True, eq=False)
class ResolvedScenario:
    """A scenario with every default filled in and its objects built."""

    scenario: schemas.Scenario
    shape: shapes.Shape
    domain: shapes.Domain
    bodies: dict[str, ConvexBody]
    grid: Optional[Grid]
    ladder: list[float]
    service: ContentService
    output: Path


def _field_path(location: tuple) -> str:
    return ".".join(str(part) for part in location) or "<root>"


class ScenarioService:
    """
    Loads scenarios, runs them and writes their reports.

    Args:
        options: Command-line overrides applied to every scenario.
    """

    def __init__(self, options: Optional[schemas.RunOptions] = None):
        self.options = options or schemas.RunOptions()

    def parse(self, text: Union[str, bytes], source: str = "<string>") -> schemas.Scenario:
        """
        Validates a JSON scenario record.

        Args:
            text: The JSON text.
            source: Name used in error messages.

        Returns:
            schemas.Scenario: The validated scenario.

        Raises:
            ScenarioParseError: If the text is not valid JSON.
            ScenarioValidationError: If a field is invalid; carries its path.
        """

        try:
            return schemas.Scenario.model_validate_json(text)
        except ValidationError as error:
            first = error.errors()[0]
            if first["type"] == "json_invalid":
                raise ScenarioParseError(source, first["msg"]) from error
            raise ScenarioValidationError(_field_path(first["loc"]), first["msg"]) from error

    def load(self, path: Union[str, Path]) -> schemas.Scenario:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as error:
            raise ScenarioParseError(str(path), str(error)) from error
        return self.parse(text, str(path))

    def resolve(self, scenario: schemas.Scenario) -> ResolvedScenario:
        """
        Builds shapes, bodies, grid and ladder with overrides and defaults applied.

        Args:
            scenario: The validated scenario.

        Returns:
            ResolvedScenario: Ready-to-run scenario.

        Raises:
            ScenarioValidationError: If the ladder violates the raster floor
                or a shape leaf has the wrong dimension.
        """

        n = scenario.dimension
        region = None
        if scenario.domain.region is not None:
            region = shapes.shape_from_description(scenario.domain.region, n, "domain.region")
        window = scenario.domain.window
        domain = shapes.Domain.create(window.lo, window.hi, region)
        shape = shapes.shape_from_description(scenario.shape, n)
        bodies = {item.id: convex.body_from_description(item) for item in scenario.bodies}

        tolerances = scenario.tolerances
        service = ContentService(
            grid_cells=self.options.grid or scenario.grid,
            dilation_mode=scenario.dilation_mode,
            rel_tol=self.options.rel_tol or tolerances.rel_tol,
            bracket_tol=tolerances.bracket_tol,
            lower_bound_tol=tolerances.lower_bound_tol,
            abs_floor_factor=tolerances.abs_floor_factor,
        )
        grid = None if n == 1 else service.grid_for(domain)

        requested = scenario.ladder
        if requested.values and self.options.eps_max is None and self.options.eps_points is None:
            ladder = list(requested.values)
        else:
            ladder = content.default_ladder(
                grid,
                self.options.eps_max or requested.eps_max,
                self.options.eps_points or requested.points,
            )
        try:
            ladder = content.validate_ladder(ladder, grid)
        except (LadderError, EpsilonBelowFloorError) as error:
            raise ScenarioValidationError("ladder", str(error)) from error

        output = Path(self.options.out or scenario.output.directory)
        return ResolvedScenario(scenario, shape, domain, bodies, grid, ladder, service, output)

    def echo(self, resolved: ResolvedScenario) -> dict:
        """The scenario record with every resolved default written out."""
        service = resolved.service
        scenario = resolved.scenario.model_copy(
            update={
                "grid": None if resolved.grid is None else service.grid_cells,
                "ladder": schemas.LadderDescription(values=resolved.ladder),
                "tolerances": schemas.ToleranceDescription(
                    rel_tol=service.rel_tol,
                    bracket_tol=service.bracket_tol,
                    lower_bound_tol=service.lower_bound_tol,
                    abs_floor_factor=service.abs_floor_factor,
                ),
                "dilation_mode": service.dilation_mode,
                "output": resolved.scenario.output.model_copy(
                    update={"directory": str(resolved.output)}
                ),
            }
        )
        return scenario.model_dump(mode="json")

    def execute(self, scenario: schemas.Scenario) -> schemas.Report:
        """
        Computes every requested curve and, if asked, the relation report.

        Args:
            scenario: The validated scenario.

        Returns:
            schemas.Report: The report; nothing is written.
        """

        resolved = self.resolve(scenario)
        logger.info(
            "Running scenario %s on %s bodies, ladder %s",
            scenario.name,
            len(resolved.bodies),
            resolved.ladder,
        )
        service = resolved.service
        curves = [
            service.curve_record(
                request.functional,
                resolved.shape,
                resolved.domain,
                body,
                resolved.ladder,
                request.target,
                request.subject,
            )
            for body in resolved.bodies.values()
            for request in scenario.functionals
        ]
        relations = None
        if scenario.relations:
            relations = service.relation_report(
                resolved.shape, resolved.domain, list(resolved.bodies.values()), resolved.ladder
            )
        return schemas.Report(scenario=self.echo(resolved), curves=curves, relations=relations)

    def run(self, path: Union[str, Path]) -> schemas.Report:
        """
        Runs a scenario file and writes the ladder CSV, summary CSV and JSON record.

        Args:
            path: Scenario file.

        Returns:
            schemas.Report: The written report.

        Raises:
            ScenarioParseError: If the file cannot be read or parsed.
            ScenarioValidationError: If a field is invalid.
            ResourceCapError: If the grid or a stencil is too large.
        """

        scenario = self.load(path)
        report = self.execute(scenario)
        self.write_report(report, scenario)
        return report

    def rows(self, report: schemas.Report) -> tuple[list[dict], list[dict]]:
        name = report.scenario["name"]
        records = list(report.curves)
        if report.relations is not None:
            records.extend(report.relations.curves)

        seen = set()
        ladder_rows, summary_rows = [], []
        for record in records:
            key = (record.functional, record.target_label, record.body)
            if key in seen:
                continue
            seen.add(key)
            for eps, value in zip(record.ladder, record.values):
                ladder_rows.append(
                    schemas.LadderRow(
                        scenario=name,
                        functional=record.functional.value,
                        target=record.target_label,
                        body=record.body,
                        h=record.spacing,
                        eps=eps,
                        value=value,
                    ).model_dump()
                )
            summary_rows.append(
                schemas.SummaryRow(
                    scenario=name,
                    functional=record.functional.value,
                    target=record.target_label,
                    body=record.body,
                    estimate=record.estimate.value,
                    lower=record.estimate.lower,
                    upper=record.estimate.upper,
                    target_value=record.target_value,
                    exists_flag=record.exists,
                ).model_dump()
            )
        return ladder_rows, summary_rows

    def write_report(self, report: schemas.Report, scenario: schemas.Scenario) -> list[Path]:
        directory = Path(report.scenario["output"]["directory"])
        ladder_rows, summary_rows = self.rows(report)
        ladder = pd.DataFrame(ladder_rows, columns=LADDER_COLUMNS)
        summary = pd.DataFrame(summary_rows, columns=SUMMARY_COLUMNS)
        written = [
            write_atomically(
                directory / scenario.output.ladder_csv,
                ladder.to_csv(index=False, float_format="%.17g"),
            ),
            write_atomically(
                directory / scenario.output.summary_csv,
                summary.to_csv(index=False, float_format="%.17g"),
            ),
            write_atomically(
                directory / scenario.output.record_json, report.model_dump_json(indent=2)
            ),
        ]
        logger.info("Report of %s written to %s", scenario.name, directory)
        return written

    def dump_field(
        self,
        path: Union[str, Path],
        body_id: str,
        out: Union[str, Path],
        method: DistanceMethod = DistanceMethod.BRUTE,
        radius: int = 3,
        fmt: FieldFormat = FieldFormat.BINARY,
    ) -> Path:
        """
        Writes the distance field of a scenario's set for one body.

        The set is rasterized with its supercover so null sets keep their cells.

        Args:
            path: Scenario file.
            body_id: Id of the body to measure distances with.
            out: Destination file.
            method: BRUTE or CHAMFER.
            radius: Chamfer radius in cells.
            fmt: BINARY or CSV.

        Returns:
            Path: The written file.

        Raises:
            ScenarioValidationError: If the body id is unknown.
            EmptySeedError: If the set covers no cell.
        """

        scenario = self.load(path)
        try:
            scenario.body(body_id)
        except KeyError as error:
            raise ScenarioValidationError("bodies", f"unknown body '{body_id}'") from error

        resolved = self.resolve(scenario)
        grid = (
            resolved.service.grid_for(resolved.domain)
            if resolved.grid is None
            else resolved.grid
        )
        voxels = raster.rasterize(resolved.shape, grid, RasterMode.SUPERCOVER)
        field = raster.distance_field(voxels, resolved.bodies[body_id], method, radius)
        return raster.write_field(field, out, fmt)

    def describe_bodies(self, path: Union[str, Path]) -> list[dict]:
        scenario = self.load(path)
        return [
            convex.describe(convex.body_from_description(item)) for item in scenario.bodies
        ]


