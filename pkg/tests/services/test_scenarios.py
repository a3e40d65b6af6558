import json

import numpy as np
import pandas as pd
import pytest

from minkowski_lab import schemas
from minkowski_lab.config import settings
from minkowski_lab.services import raster
from minkowski_lab.services.scenarios import (
    LADDER_COLUMNS,
    SUMMARY_COLUMNS,
    ScenarioService,
)
from minkowski_lab.utils.enums import DistanceMethod, FieldFormat, Functional
from minkowski_lab.utils.exceptions import ScenarioParseError, ScenarioValidationError
from tests.utils import interval_scenario, square_scenario, write_scenario


@pytest.fixture(name="scenario_service")
def fixture_scenario_service() -> ScenarioService:
    return ScenarioService()


def test_parse_rejects_invalid_json(scenario_service: ScenarioService):
    with pytest.raises(ScenarioParseError):
        scenario_service.parse('{"name": "broken",', "broken.json")


@pytest.mark.parametrize(
    "path, value, field_path",
    [
        (("shape", "lo"), "zero", "shape.box.lo.0"),
        (("grid",), 4, "grid"),
        (("bodies", 0, "radius"), -1.0, "bodies.0.radius"),
    ],
)
def test_parse_reports_field_path(
    scenario_service: ScenarioService, path: tuple, value, field_path: str
):
    """
    Test case for the field path carried by validation errors.

    Args:
        scenario_service (fixture): Scenario service.
        path (tuple): Location of the corrupted value in the record.
        value: The invalid value.
        field_path (str): Expected dotted path.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    record = square_scenario()
    target = record
    for key in path[:-1]:
        target = target[key]
    target[path[-1]] = [value] if path[-1] == "lo" else value

    with pytest.raises(ScenarioValidationError) as error:
        scenario_service.parse(json.dumps(record))

    assert error.value.field_path == field_path


def test_parse_rejects_unknown_fields(scenario_service: ScenarioService):
    record = interval_scenario()
    record["colour"] = "blue"

    with pytest.raises(ScenarioValidationError) as error:
        scenario_service.parse(json.dumps(record))

    assert error.value.field_path == "colour"


def test_load_missing_file(scenario_service: ScenarioService, tmp_path):
    with pytest.raises(ScenarioParseError):
        scenario_service.load(tmp_path / "missing.json")


def test_resolve_rejects_ladder_below_floor(scenario_service: ScenarioService):
    """
    Test case for a ladder reaching below four cells of the raster.

    Args:
        scenario_service (fixture): Scenario service.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    record = square_scenario()
    record["ladder"] = {"values": [0.5, 0.375, 0.125]}
    scenario = scenario_service.parse(json.dumps(record))

    with pytest.raises(ScenarioValidationError) as error:
        scenario_service.resolve(scenario)

    assert error.value.field_path == "ladder"


def test_resolve_defaults(scenario_service: ScenarioService):
    resolved = scenario_service.resolve(scenario_service.parse(json.dumps(interval_scenario())))

    assert resolved.grid is None
    assert resolved.ladder == [0.25, 0.125, 0.0625, 0.03125]
    assert list(resolved.bodies) == ["unit"]
    assert resolved.service.rel_tol == settings.rel_tol


def test_resolve_applies_overrides():
    options = schemas.RunOptions(grid=32, eps_max=2.0, eps_points=3, rel_tol=0.1, out="elsewhere")
    service = ScenarioService(options)
    resolved = service.resolve(service.parse(json.dumps(square_scenario())))

    assert resolved.grid.spacing == pytest.approx(0.125)
    assert resolved.ladder == [2.0, 1.0, 0.5]
    assert resolved.service.rel_tol == 0.1
    assert str(resolved.output) == "elsewhere"


def test_echo_writes_defaults(scenario_service: ScenarioService):
    resolved = scenario_service.resolve(scenario_service.parse(json.dumps(square_scenario())))
    echo = scenario_service.echo(resolved)

    assert echo["grid"] == 64
    assert echo["ladder"]["values"] == [0.5, 0.375, 0.25]
    assert echo["tolerances"]["rel_tol"] == settings.rel_tol
    assert echo["dilation_mode"] == settings.dilation_mode
    assert echo["output"]["directory"] == "reports"


def test_run_interval_scenario(scenario_service: ScenarioService, tmp_path):
    """
    Test case for running the exact 1-D scenario and reading back its reports.

    Args:
        scenario_service (fixture): Scenario service.
        tmp_path (fixture): Temporary directory.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    output = tmp_path / "reports"
    path = write_scenario(tmp_path, interval_scenario(output))
    report = scenario_service.run(path)

    ladder = pd.read_csv(output / "ladder.csv")
    summary = pd.read_csv(output / "summary.csv")
    record = json.loads((output / "report.json").read_text(encoding="utf-8"))

    assert list(ladder.columns) == LADDER_COLUMNS
    assert list(summary.columns) == SUMMARY_COLUMNS
    assert not summary.duplicated(["functional", "target", "body"]).any()
    assert len(ladder) == 4 * len(summary)
    assert ladder["h"].isna().all()

    sm = summary[(summary["functional"] == "SM") & (summary["target"] == "set")]
    assert sm["estimate"].iloc[0] == pytest.approx(4.0)
    assert not sm["exists_flag"].iloc[0]

    assert record["scenario"]["ladder"]["values"] == [0.25, 0.125, 0.0625, 0.03125]
    assert report.relations is not None
    assert record["relations"]["bodies"][0]["body"] == "unit"


def test_rows_deduplicate_relation_curves(scenario_service: ScenarioService):
    report = scenario_service.execute(scenario_service.parse(json.dumps(interval_scenario())))
    ladder_rows, summary_rows = scenario_service.rows(report)

    keys = {(row["functional"], row["target"], row["body"]) for row in summary_rows}
    requested = {(curve.functional.value, curve.target_label) for curve in report.curves}

    assert len(keys) == len(summary_rows)
    assert requested <= {(functional, target) for functional, target, _ in keys}
    assert len(ladder_rows) == 4 * len(summary_rows)
    assert report.curves[0].functional == Functional.SM


def test_run_square_scenario(scenario_service: ScenarioService, tmp_path):
    """
    Test case for a coarse planar run with two bodies.

    Args:
        scenario_service (fixture): Scenario service.
        tmp_path (fixture): Temporary directory.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    output = tmp_path / "square"
    report = scenario_service.run(write_scenario(tmp_path, square_scenario(output)))
    ladder = pd.read_csv(output / "ladder.csv")

    assert [curve.body for curve in report.curves] == ["ball1", "square"]
    assert len(ladder) == 6
    assert ladder["h"].unique().tolist() == [0.0625]
    for curve in report.curves:
        assert curve.values[-1] == pytest.approx(curve.target_value, rel=0.15)


def test_dump_field(scenario_service: ScenarioService, tmp_path):
    path = write_scenario(tmp_path, square_scenario())
    out = scenario_service.dump_field(
        path, "square", tmp_path / "field.csv", DistanceMethod.CHAMFER, 3, FieldFormat.CSV
    )
    header, values = raster.read_field(out)

    assert header.counts == [64, 64]
    assert values.shape == (64, 64)
    assert values.min() == 0.0


def test_dump_field_unknown_body(scenario_service: ScenarioService, tmp_path):
    path = write_scenario(tmp_path, square_scenario())

    with pytest.raises(ScenarioValidationError) as error:
        scenario_service.dump_field(path, "hexagon", tmp_path / "field.bin")

    assert error.value.field_path == "bodies"


def test_describe_bodies(scenario_service: ScenarioService, tmp_path):
    descriptions = scenario_service.describe_bodies(write_scenario(tmp_path, square_scenario()))

    assert [item["body"] for item in descriptions] == ["ball1", "square"]
    assert descriptions[1]["diameter"] == pytest.approx(2 * np.sqrt(2))
