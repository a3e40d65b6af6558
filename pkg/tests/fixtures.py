import pytest

from minkowski_lab.data.bodies import standard_bodies
from minkowski_lab.models import ConvexBody, Grid
from minkowski_lab.services import convex, shapes
from minkowski_lab.services.content import ContentService


@pytest.fixture(name="bodies", scope="session")
def fixture_bodies() -> dict[str, ConvexBody]:
    """
    Session-scoped standard planar bodies.

    Returns:
        dict[str, ConvexBody]: ball1, ball2, square, cross and triangle.
    """

    return standard_bodies()


@pytest.fixture(name="unit_interval")
def fixture_unit_interval() -> ConvexBody:
    return convex.make_interval(-1.0, 1.0, "unit")


@pytest.fixture(name="skew_interval")
def fixture_skew_interval() -> ConvexBody:
    return convex.make_interval(-1.0, 2.0, "skew")


@pytest.fixture(name="line_domain")
def fixture_line_domain() -> shapes.Domain:
    return shapes.Domain.create([-1.0], [3.0])


@pytest.fixture(name="plane_domain")
def fixture_plane_domain() -> shapes.Domain:
    """
    Planar domain: Omega is the whole plane, computation in [-1.5, 2.5]^2.

    Returns:
        shapes.Domain: The domain.
    """

    return shapes.Domain.create([-1.5, -1.5], [2.5, 2.5])


@pytest.fixture(name="interval_point")
def fixture_interval_point() -> shapes.Shape:
    """
    The set [0, 1] with the isolated point 2.

    Returns:
        shapes.Shape: A one-dimensional shape.
    """

    return shapes.intervals([(0.0, 1.0), (2.0, 2.0)])


@pytest.fixture(name="unit_square")
def fixture_unit_square() -> shapes.Shape:
    return shapes.box([0.0, 0.0], [1.0, 1.0])


@pytest.fixture(name="coarse_grid")
def fixture_coarse_grid(plane_domain: shapes.Domain) -> Grid:
    return Grid.covering(plane_domain.window_lo, plane_domain.window_hi, 64)


@pytest.fixture(name="content_service")
def fixture_content_service() -> ContentService:
    """
    Content service on a 128-cell grid with stencil dilation.

    Returns:
        ContentService: A fresh service; curves are memoized per instance.
    """

    return ContentService(grid_cells=128, dilation_mode="stencil")


@pytest.fixture(name="seeded_service")
def fixture_seeded_service() -> ContentService:
    return ContentService(grid_cells=128, dilation_mode="seeded")
