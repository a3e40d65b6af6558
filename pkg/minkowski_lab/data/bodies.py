from minkowski_lab import schemas
from minkowski_lab.models import ConvexBody
from minkowski_lab.services import convex

SQUARE_VERTICES = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]
CROSS_VERTICES = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]
TRIANGLE_VERTICES = [[2.0, -1.0], [-1.0, 2.0], [-1.0, -1.0]]


def get_body_list() -> list[dict[str, object]]:
    """
    Returns the descriptions of the standard planar bodies.

    Returns:
        list[dict[str, object]]:
            Body descriptions in scenario format: two Euclidean balls, the
            square, the cross-polytope and a non-symmetric triangle.
    """

    return [
        {"id": "ball1", "kind": "ball", "dimension": 2, "radius": 1.0},
        {"id": "ball2", "kind": "ball", "dimension": 2, "radius": 2.0},
        {"id": "square", "kind": "polytope", "vertices": SQUARE_VERTICES},
        {"id": "cross", "kind": "polytope", "vertices": CROSS_VERTICES},
        {"id": "triangle", "kind": "polytope", "vertices": TRIANGLE_VERTICES},
    ]


def standard_bodies() -> dict[str, ConvexBody]:
    return {
        item["id"]: convex.body_from_description(schemas.BodyDescription(**item))
        for item in get_body_list()
    }
