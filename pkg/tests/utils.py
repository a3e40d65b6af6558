import json
from pathlib import Path
from typing import Optional

import numpy as np

from minkowski_lab.models import Grid, VoxelSet, frozen_array


def write_scenario(directory: Path, record: dict, name: str = "scenario.json") -> Path:
    """
    Writes a scenario record as JSON.

    Args:
        directory: Target directory.
        record: The scenario record.
        name: File name.

    Returns:
        Path: The written file.
    """

    path = directory / name
    path.write_text(json.dumps(record), encoding="utf-8")
    return path


def interval_scenario(output: Optional[Path] = None) -> dict:
    """
    Returns the exact 1-D scenario E = [0, 1] u {2} with the body [-1, 1].

    Args:
        output: Report directory; defaults to the scenario default.

    Returns:
        dict: Scenario record.
    """

    record = {
        "name": "interval_point",
        "dimension": 1,
        "domain": {"window": {"lo": [-1.0], "hi": [3.0]}},
        "shape": {
            "op": "intervals",
            "intervals": [{"lo": 0.0, "hi": 1.0}, {"lo": 2.0, "hi": 2.0}],
        },
        "bodies": [{"id": "unit", "kind": "interval", "interval": [-1.0, 1.0]}],
        "functionals": [
            {"functional": "SM"},
            {"functional": "M", "target": "topological"},
        ],
        "relations": True,
    }
    if output is not None:
        record["output"] = {"directory": str(output)}
    return record


def square_scenario(output: Optional[Path] = None, grid: int = 64) -> dict:
    """
    Returns a coarse planar scenario: the unit square with the unit ball.

    Args:
        output: Report directory; defaults to the scenario default.
        grid: Cells along the longest window axis.

    Returns:
        dict: Scenario record with an explicit ladder above the raster floor.
    """

    record = {
        "name": "coarse_square",
        "dimension": 2,
        "domain": {"window": {"lo": [-1.5, -1.5], "hi": [2.5, 2.5]}},
        "shape": {"op": "box", "lo": [0.0, 0.0], "hi": [1.0, 1.0]},
        "bodies": [
            {"id": "ball1", "kind": "ball", "dimension": 2, "radius": 1.0},
            {"id": "square", "kind": "box", "lo": [-1.0, -1.0], "hi": [1.0, 1.0]},
        ],
        "functionals": [{"functional": "M", "target": "topological"}],
        "relations": False,
        "grid": grid,
        "ladder": {"values": [0.5, 0.375, 0.25]},
    }
    if output is not None:
        record["output"] = {"directory": str(output)}
    return record


def single_cell(grid: Grid, index: tuple[int, ...]) -> VoxelSet:
    mask = np.zeros(grid.counts, dtype=bool)
    mask[index] = True
    return VoxelSet(grid, frozen_array(mask, dtype=bool))
