import pytest

from minkowski_lab.main import EXIT_ERROR, EXIT_OK, main
from minkowski_lab.services import raster
from tests.utils import square_scenario, write_scenario


@pytest.mark.parametrize(
    "method, fmt, name",
    [("brute", "binary", "field.bin"), ("chamfer", "csv", "field.csv")],
)
def test_field_dump(tmp_path, method: str, fmt: str, name: str):
    """
    Test case for dumping a distance field in both formats.

    Args:
        tmp_path (fixture): Temporary directory.
        method (str): Distance method.
        fmt (str): Output format.
        name (str): Output file name.

    Returns:
        None

    Raises:
        AssertionError: If the test fails.
    """

    path = write_scenario(tmp_path, square_scenario())
    out = tmp_path / name

    exit_code = main(
        ["field", str(path), "--body", "ball1", "--out", str(out), "--method", method,
         "--format", fmt]
    )
    header, values = raster.read_field(out)

    assert exit_code == EXIT_OK
    assert header.body == "ball1"
    assert header.method.value == method
    assert values.shape == (64, 64)


def test_field_unknown_body(tmp_path, capsys):
    path = write_scenario(tmp_path, square_scenario())

    exit_code = main(["field", str(path), "--body", "hexagon", "--out", str(tmp_path / "f")])

    assert exit_code == EXIT_ERROR
    assert "hexagon" in capsys.readouterr().err


def test_field_empty_seed(tmp_path):
    record = square_scenario()
    record["shape"] = {"op": "box", "lo": [3.0, 3.0], "hi": [4.0, 4.0]}
    path = write_scenario(tmp_path, record)

    exit_code = main(["field", str(path), "--body", "ball1", "--out", str(tmp_path / "f")])

    assert exit_code == EXIT_ERROR
