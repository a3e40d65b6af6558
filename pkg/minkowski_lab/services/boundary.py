"""Lebesgue densities, density-one / density-zero parts and reduced boundaries."""

import math
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy import integrate
from scipy.signal import fftconvolve

from minkowski_lab.config import settings
from minkowski_lab.logger import get_logger
from minkowski_lab.models import (
    BoundaryMesh,
    ConvexBody,
    DensityEstimate,
    Grid,
    VoxelLabels,
    VoxelSet,
    frozen_array,
)
from minkowski_lab.services import convex, shapes
from minkowski_lab.services.intervals import IntervalSet
from minkowski_lab.utils.enums import DensityClass, Location, VoxelLabel
from minkowski_lab.utils.exceptions import LadderError, OutOfWindowError
from minkowski_lab.utils.file_utils import write_atomically

logger = get_logger(__name__)

TAIL = 3
QUAD_LIMIT = 200


def default_radii(radius: Optional[float] = None, points: Optional[int] = None) -> list[float]:
    radius = settings.density_radius if radius is None else radius
    points = settings.density_radii_points if points is None else points
    return [radius * 2.0**-k for k in range(points)]


def classify_density(density: float) -> DensityClass:
    low, high = settings.density_threshold_low, settings.density_threshold_high
    if density <= low:
        return DensityClass.DENSITY0
    if density >= high:
        return DensityClass.DENSITY1
    if abs(density - 0.5) <= min(low, 1 - high):
        return DensityClass.HALF
    return DensityClass.OTHER


def _planar_ratio(shape: shapes.Shape, point: np.ndarray, radius: float) -> float:
    # y = py + r sin(t), dy = half dt
    px, py = float(point[0]), float(point[1])

    def covered(t: float) -> float:
        half = radius * math.cos(t)
        chord = IntervalSet.interval(px - half, px + half, False, False)
        section = shapes.planar_section(shape, py + radius * math.sin(t))
        return (section & chord).measure() * half

    kinks = [
        math.asin((y - py) / radius)
        for y in shapes.section_breaks(shape)
        if py - radius < y < py + radius
    ]
    area, _ = integrate.quad(
        covered,
        -math.pi / 2,
        math.pi / 2,
        points=kinks or None,
        limit=QUAD_LIMIT,
        epsabs=settings.exact_tolerance * radius**2,
        epsrel=settings.exact_tolerance,
    )
    return float(np.clip(area / (math.pi * radius**2), 0.0, 1.0))


def _ball_ratio(shape: shapes.Shape, point: np.ndarray, radius: float) -> float:
    if shape.dimension == 1:
        x = float(point[0])
        window = IntervalSet.interval(x - radius, x + radius)
        return (shape.to_interval_set() & window).measure() / (2 * radius)
    if shape.dimension == 2:
        return _planar_ratio(shape, point, radius)

    grid = Grid.covering(point - radius, point + radius, settings.density_resolution)
    centers = grid.centers()
    in_ball = np.linalg.norm(centers - point, axis=1) < radius
    inside = shape.classify(centers[in_ball]) == Location.INSIDE
    return float(np.count_nonzero(inside)) / float(np.count_nonzero(in_ball))


def density_estimate(
    shape: shapes.Shape,
    point: Sequence[float],
    radii: Optional[Sequence[float]] = None,
    domain: Optional[shapes.Domain] = None,
) -> DensityEstimate:
    """
    Estimates the Lebesgue density of a shape at a point.

    One-dimensional ratios are exact interval measures. Planar ratios
    integrate the horizontal sections of the shape across the ball with
    adaptive quadrature; in 3-D each ball is rasterized locally at the
    configured resolution. The density is the mean of the ratios at the
    three smallest radii.

    Args:
        shape: The set E.
        point: The point x.
        radii: Strictly decreasing radii; defaults to the configured ladder.
        domain: When given, every ball must stay inside its window.

    Returns:
        DensityEstimate: Ratios, density and its classification.

    Raises:
        LadderError: If the radii are not positive and strictly decreasing.
        OutOfWindowError: If a ball leaves the domain window.
    """

    x = np.asarray(point, dtype=float).reshape(shape.dimension)
    radii = list(default_radii() if radii is None else radii)
    if not radii or any(r <= 0 for r in radii):
        raise LadderError("radii must be positive")
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise LadderError("radii must be strictly decreasing")
    if domain is not None:
        reach = radii[0]
        if np.any(x - reach < domain.window_lo) or np.any(x + reach > domain.window_hi):
            raise OutOfWindowError()

    ratios = tuple(_ball_ratio(shape, x, r) for r in radii)
    density = float(np.clip(np.mean(ratios[-TAIL:]), 0.0, 1.0))
    return DensityEstimate(
        point=tuple(float(v) for v in x),
        radii=tuple(float(r) for r in radii),
        ratios=ratios,
        density=density,
        classification=classify_density(density),
    )


def reduced_boundary(shape: shapes.Shape, domain: shapes.Domain) -> BoundaryMesh:
    """Facets of the boundary where E blows up to a half-space, inside Omega."""
    return shapes.boundary_mesh(shape, domain).reduced_part()


def _drop_null_leaves(shape: shapes.Shape) -> shapes.Shape:
    if isinstance(shape, shapes.Union_):
        return shapes.Union_(tuple(_drop_null_leaves(op) for op in shape.operands))
    if isinstance(shape, shapes.Intersection):
        return shapes.Intersection(tuple(_drop_null_leaves(op) for op in shape.operands))
    if isinstance(shape, shapes.Difference):
        return shapes.Difference(_drop_null_leaves(shape.left), _drop_null_leaves(shape.right))
    if shape.null_mass:
        return shapes.Empty(shape.dimension)
    return shape


def density_one_part(shape: shapes.Shape) -> shapes.Shape:
    """
    The set E^1 of points where E has Lebesgue density one.

    In one dimension this is exact interval arithmetic. Otherwise null-mass
    leaves (points, segments) are dropped from the expression tree, which
    is exact for finite boolean combinations of full-dimensional leaves.

    Args:
        shape: The set E.

    Returns:
        shapes.Shape: E^1.
    """

    if shape.dimension == 1:
        return shapes.Intervals(shape.to_interval_set().density_one())
    return _drop_null_leaves(shape)


def density_zero_part(shape: shapes.Shape) -> shapes.Shape:
    if shape.dimension == 1:
        return shapes.Intervals(shape.to_interval_set().density_zero())
    return shapes.Difference(shapes.WholeSpace(shape.dimension), density_one_part(shape))


def essential_boundary_points(shape: shapes.Shape) -> IntervalSet:
    """One-dimensional essential boundary: neither density zero nor density one."""
    values = shape.to_interval_set()
    return ~(values.density_one() | values.density_zero())


def outer_content_prediction(
    shape: shapes.Shape, domain: shapes.Domain, body: ConvexBody
) -> float:
    """
    Per_C(E) + diam(C) * #(boundary points of E with density zero, inside Omega).

    Only meaningful in one dimension, where it is the limit of the outer
    content of a finite union of intervals and points.
    """

    values = shape.to_interval_set()
    region = domain.region.to_interval_set()
    stray = values.boundary() & values.density_zero() & region
    count = len(stray.isolated_points())
    perimeter = shapes.anisotropic_perimeter(shape, domain, body)
    return perimeter + convex.diameter(body) * count


def _ball_footprint(radius: float, dimension: int) -> np.ndarray:
    reach = int(math.floor(radius))
    axes = [np.arange(-reach, reach + 1)] * dimension
    grid = np.meshgrid(*axes, indexing="ij")
    return (sum(g.astype(float) ** 2 for g in grid) <= radius * radius).astype(float)


def classify_voxels(voxels: VoxelSet, radii_in_cells: Sequence[float]) -> VoxelLabels:
    """
    Labels every cell E0, E1 or ESSENTIAL from discrete density ratios.

    Args:
        voxels: The set E on its grid.
        radii_in_cells: Neighbourhood radii, in cells.

    Returns:
        VoxelLabels: One label per cell.
    """

    mask = voxels.mask.astype(float)
    ratios = np.zeros(voxels.grid.counts)
    for radius in radii_in_cells:
        kernel = _ball_footprint(radius, voxels.grid.dimension)
        # cells near the border only see the part of the ball inside the grid
        in_grid = fftconvolve(np.ones_like(mask), kernel, mode="same")
        ratios += fftconvolve(mask, kernel, mode="same") / in_grid
    ratios /= len(radii_in_cells)

    labels = np.full(voxels.grid.counts, int(VoxelLabel.ESSENTIAL), dtype=np.int8)
    labels[ratios <= settings.density_threshold_low] = VoxelLabel.E0
    labels[ratios >= settings.density_threshold_high] = VoxelLabel.E1
    logger.info(
        "Classified %s cells, %s essential",
        voxels.grid.cell_count,
        int(np.count_nonzero(labels == VoxelLabel.ESSENTIAL)),
    )
    return VoxelLabels(voxels.grid, frozen_array(labels, dtype=np.int8))


def write_labels(labels: VoxelLabels, path: Union[str, Path]) -> Path:
    grid = labels.grid
    columns = {f"i{axis}": index.ravel() for axis, index in enumerate(np.indices(grid.counts))}
    columns["label"] = [VoxelLabel(int(code)).name for code in labels.labels.ravel()]
    return write_atomically(path, pd.DataFrame(columns).to_csv(index=False))
