from minkowski_lab.data.bodies import SQUARE_VERTICES, TRIANGLE_VERTICES

ORIGIN = [0.0, 0.0]


def _disc(radius: float) -> dict[str, object]:
    return {"op": "ball", "center": ORIGIN, "radius": radius}


def _annulus() -> dict[str, object]:
    return {"op": "difference", "left": _disc(2.0), "right": _disc(1.0)}


def get_scenario_list() -> list[dict[str, object]]:
    """
    Returns the built-in scenarios run by `verify`.

    Returns:
        list[dict[str, object]]:
            Scenario records in the JSON scenario format. Each names its
            set, domain, bodies and the functionals it exercises.
    """

    ball1 = {"id": "ball1", "kind": "ball", "dimension": 2, "radius": 1.0}
    square = {"id": "square", "kind": "polytope", "vertices": SQUARE_VERTICES}
    triangle = {"id": "triangle", "kind": "polytope", "vertices": TRIANGLE_VERTICES}

    return [
        {
            "name": "annulus",
            "dimension": 2,
            "domain": {
                "region": {"op": "union", "operands": [_disc(1.0), _annulus()]},
                "window": {"lo": [-2.75, -2.75], "hi": [2.75, 2.75]},
            },
            "shape": _annulus(),
            "bodies": [ball1],
            "functionals": [
                {"functional": "FrakM", "target": "topological"},
                {"functional": "ScriptM"},
                {"functional": "M", "target": "topological"},
            ],
            "relations": False,
            "grid": 1024,
        },
        {
            "name": "disc_square",
            "dimension": 2,
            "domain": {"window": {"lo": [-2.0, -2.0], "hi": [2.0, 2.0]}},
            "shape": _disc(1.0),
            "bodies": [square],
            "functionals": [{"functional": "SM"}],
            "relations": False,
            "grid": 1024,
        },
        {
            "name": "unit_square",
            "dimension": 2,
            "domain": {"window": {"lo": [-1.5, -1.5], "hi": [2.5, 2.5]}},
            "shape": {"op": "box", "lo": [0.0, 0.0], "hi": [1.0, 1.0]},
            "bodies": [ball1, triangle],
            "functionals": [{"functional": "M", "target": "topological"}],
            "relations": False,
            "grid": 1024,
        },
        {
            "name": "segment",
            "dimension": 2,
            "domain": {"window": {"lo": [-1.0, -1.0], "hi": [2.0, 2.0]}},
            "shape": {"op": "segments", "segments": [[[0.0, 1.0], [1.0, 0.0]]]},
            "bodies": [square],
            "functionals": [{"functional": "M"}],
            "relations": False,
            "grid": 1024,
        },
        {
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
                {"functional": "M", "target": "reduced"},
                {"functional": "FrakM", "target": "reduced"},
            ],
            "relations": True,
        },
    ]


def get_scenario(name: str) -> dict[str, object]:
    for scenario in get_scenario_list():
        if scenario["name"] == name:
            return scenario
    raise KeyError(name)
