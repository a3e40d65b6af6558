"""Uniform grids: rasterization, stencil dilation and distance transforms."""

import functools
import io
import math
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
from scipy import ndimage
from scipy.signal import fftconvolve

from minkowski_lab.config import settings
from minkowski_lab.logger import get_logger
from minkowski_lab.models import (
    BoundaryMesh,
    ConvexBody,
    Grid,
    ScalarField,
    Stencil,
    VoxelSet,
    frozen_array,
)
from minkowski_lab.schemas import FieldHeader
from minkowski_lab.services import shapes
from minkowski_lab.utils.enums import (
    DistanceMethod,
    FieldFormat,
    Location,
    RasterMode,
)
from minkowski_lab.utils.exceptions import (
    DimensionMismatchError,
    EmptySeedError,
    GridMismatchError,
    ResourceCapError,
    StencilTooLargeError,
    UnsupportedDimensionError,
)
from minkowski_lab.utils.file_utils import write_atomically

logger = get_logger(__name__)

CLOSED_SLACK = 1e-12


def check_grid(grid: Grid) -> None:
    if grid.cell_count > settings.max_grid_cells:
        raise ResourceCapError("Grid", grid.cell_count, settings.max_grid_cells)


def empty_set(grid: Grid) -> VoxelSet:
    return VoxelSet(grid, frozen_array(np.zeros(grid.counts, dtype=bool), dtype=bool))


def offset_gauge(body: ConvexBody, offsets: np.ndarray, spacing: float) -> np.ndarray:
    """
    Gauge of h*o for integer offsets o, shape (..., n).

    Evaluated with elementwise operations only, so equal offsets give
    bit-identical values whatever the array shape.
    """

    x = spacing * offsets.astype(float)
    n = x.shape[-1]
    if body.is_ball:
        total = x[..., 0] * x[..., 0]
        for axis in range(1, n):
            total = total + x[..., axis] * x[..., axis]
        return np.sqrt(total) / body.radius

    result = np.zeros(x.shape[:-1])
    for normal, offset in zip(body.normals, body.offsets):
        dot = x[..., 0] * normal[0]
        for axis in range(1, n):
            dot = dot + x[..., axis] * normal[axis]
        result = np.maximum(result, dot / offset)
    return result


@functools.lru_cache(maxsize=32)
def center_mask(shape: shapes.Shape, grid: Grid) -> np.ndarray:
    """Cells whose centre is strictly inside the shape."""
    check_grid(grid)
    codes = shape.classify(grid.centers())
    return frozen_array((codes == Location.INSIDE).reshape(grid.counts), dtype=bool)


def mesh_samples(mesh: BoundaryMesh, step: float) -> np.ndarray:
    """
    Points spread over every facet with spacing at most `step`.

    Args:
        mesh: Boundary mesh.
        step: Maximum sample spacing.

    Returns:
        np.ndarray: Samples (m, n), facet vertices included.
    """

    n = mesh.dimension
    if mesh.is_empty:
        return np.empty((0, n))
    if n == 1:
        return mesh.vertices[:, 0, :]
    if n == 2:
        starts, ends = mesh.vertices[:, 0], mesh.vertices[:, 1]
        lengths = np.linalg.norm(ends - starts, axis=1)
        counts = np.maximum(1, np.ceil(lengths / step).astype(int))
        owner = np.repeat(np.arange(len(counts)), counts + 1)
        first = np.repeat(np.cumsum(counts + 1) - (counts + 1), counts + 1)
        t = (np.arange(owner.size) - first) / counts[owner]
        return starts[owner] + t[:, None] * (ends - starts)[owner]

    blocks = []
    for a, b, c in mesh.vertices:
        k = max(1, math.ceil(max(np.linalg.norm(b - a), np.linalg.norm(c - a)) / step))
        i, j = np.meshgrid(np.arange(k + 1), np.arange(k + 1), indexing="ij")
        keep = i + j <= k
        u, v = i[keep] / k, j[keep] / k
        blocks.append(a + u[:, None] * (b - a) + v[:, None] * (c - a))
    return np.concatenate(blocks)


def supercover_mask(mesh: BoundaryMesh, grid: Grid) -> np.ndarray:
    samples = mesh_samples(mesh, 0.25 * grid.spacing)
    mask = np.zeros(grid.counts, dtype=bool)
    if samples.size == 0:
        return mask
    indices, inside = grid.index_of(samples)
    mask[tuple(indices[inside].T)] = True
    return mask


def rasterize(
    shape: shapes.Shape, grid: Grid, mode: RasterMode = RasterMode.CELL_CENTER
) -> VoxelSet:
    """
    Turns a shape into a voxel set.

    Args:
        shape: The shape.
        grid: Target grid.
        mode: CELL_CENTER keeps cells whose centre is inside; SUPERCOVER also
            keeps every cell touched by the shape's boundary, so null sets
            survive.

    Returns:
        VoxelSet: The rasterized set.

    Raises:
        DimensionMismatchError: If the shape and grid dimensions differ.
    """

    if shape.dimension != grid.dimension:
        raise DimensionMismatchError(grid.dimension, shape.dimension)
    mask = np.array(center_mask(shape, grid))
    if mode == RasterMode.SUPERCOVER:
        window = shapes.Domain.create(grid.origin, grid.upper)
        mask |= supercover_mask(shapes.boundary_mesh(shape, window), grid)
    return VoxelSet(grid, frozen_array(mask, dtype=bool))


def measure(voxels: VoxelSet) -> float:
    return voxels.count * voxels.grid.cell_volume


def build_stencil(
    body: ConvexBody, eps: float, grid: Grid, closed: bool = True
) -> Stencil:
    """
    Enumerates the integer offsets o with gauge(C, h*o) <= eps.

    Args:
        body: Convex body C.
        eps: Dilation scale.
        grid: Grid providing the spacing h.
        closed: Use <= eps (closed body) or < eps (its interior).

    Returns:
        Stencil: Offsets and their world displacements.

    Raises:
        StencilTooLargeError: If the search box exceeds the configured cap.
    """

    h = grid.spacing
    n = grid.dimension
    reach = math.ceil(eps * (1 + CLOSED_SLACK) * body.circumradius / h)
    candidates = (2 * reach + 1) ** n
    if candidates > settings.max_stencil_offsets:
        raise StencilTooLargeError(candidates, settings.max_stencil_offsets)

    axes = [np.arange(-reach, reach + 1)] * n
    box = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    values = offset_gauge(body, box, h)
    keep = values <= eps * (1 + CLOSED_SLACK) if closed else values < eps
    offsets = box[keep]
    return Stencil(
        grid=grid,
        offsets=frozen_array(offsets, dtype=np.int64),
        displacements=frozen_array(h * offsets),
        body=body,
        eps=eps,
        closed=closed,
    )


def footprint(offsets: np.ndarray, dimension: int) -> np.ndarray:
    reach = int(np.max(np.abs(offsets))) if offsets.size else 0
    kernel = np.zeros((2 * reach + 1,) * dimension)
    kernel[tuple((offsets + reach).T)] = 1.0
    return kernel


def dilate_mask(mask: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    if not mask.any():
        return np.zeros_like(mask, dtype=bool)
    if offsets.shape[0] == 1 and not offsets.any():
        return np.array(mask, dtype=bool)
    kernel = footprint(offsets, mask.ndim)
    return fftconvolve(mask.astype(float), kernel, mode="same") > 0.5


def dilate(voxels: VoxelSet, stencil: Stencil) -> VoxelSet:
    """
    Dilates a voxel set: x is set iff x - o is in the set for some offset o.

    Args:
        voxels: Input set.
        stencil: Offsets built on the same grid.

    Returns:
        VoxelSet: The dilation; cells pushed outside the grid are dropped.

    Raises:
        GridMismatchError: If the stencil was built for another grid.
    """

    if stencil.grid != voxels.grid:
        raise GridMismatchError()
    return voxels.with_mask(dilate_mask(voxels.mask, stencil.offsets))


# Seeded dilation: F + eps C = F  union  (dF + eps C), dF given as segments


def _simplify_chain(chain: np.ndarray, sagitta: float, max_length: float) -> list:
    pieces = []
    start = 0
    last = len(chain) - 1
    while start < last:
        end = start + 1
        while end < last:
            candidate = end + 1
            a, b = chain[start], chain[candidate]
            span = b - a
            length = float(np.linalg.norm(span))
            if length > max_length:
                break
            inner = chain[start + 1 : candidate] - a
            cross = np.abs(inner[:, 0] * span[1] - inner[:, 1] * span[0]) / max(length, 1e-300)
            if np.max(cross) > sagitta:
                break
            end = candidate
        pieces.append((chain[start], chain[end]))
        start = end
    return pieces


def seed_segments(mesh: BoundaryMesh, grid: Grid) -> np.ndarray:
    """
    Approximates a 2-D boundary mesh by few straight seed segments.

    Arc chains are merged greedily while the chord deviation stays within
    the configured sagitta; long segments are cut to a bounded length so
    each seed touches a small block of cells.

    Args:
        mesh: Two-dimensional boundary mesh.
        grid: Grid providing the spacing h.

    Returns:
        np.ndarray: Segments (k, 2, 2); point facets give degenerate segments.

    Raises:
        UnsupportedDimensionError: If the mesh is not two-dimensional.
    """

    if mesh.dimension != 2:
        raise UnsupportedDimensionError(mesh.dimension, "Seeded dilation")
    if mesh.is_empty:
        return np.empty((0, 2, 2))

    h = grid.spacing
    sagitta = settings.seed_sagitta_cells * h
    max_length = 16 * h
    pieces = []

    chains = mesh.chains
    for chain_id in np.unique(chains[chains >= 0]):
        facets = mesh.vertices[chains == chain_id]
        polyline = np.vstack([facets[:, 0], facets[-1:, 1]])
        pieces.extend(_simplify_chain(polyline, sagitta, max_length))

    for a, b in mesh.vertices[chains < 0]:
        count = max(1, math.ceil(float(np.linalg.norm(b - a)) / max_length))
        ts = np.linspace(0.0, 1.0, count + 1)
        for t0, t1 in zip(ts, ts[1:]):
            pieces.append((a + t0 * (b - a), a + t1 * (b - a)))
    return np.array(pieces, dtype=float)


def _segment_hits(
    centers: np.ndarray, start: np.ndarray, end: np.ndarray, body: ConvexBody, eps: float
) -> np.ndarray:
    direction = end - start
    rel = centers - start
    if body.is_ball:
        length2 = float(direction @ direction)
        t = np.clip(rel @ direction / length2, 0.0, 1.0) if length2 > 0 else 0.0
        gap = rel - np.multiply.outer(t, direction) if length2 > 0 else rel
        return np.linalg.norm(gap, axis=1) <= eps * body.radius * (1 + CLOSED_SLACK)

    # exists t in [0, 1] with N.(x - a) - t N.d <= eps * offset for every facet
    along = body.normals @ direction
    slack = rel @ body.normals.T - eps * body.offsets * (1 + CLOSED_SLACK)
    lower = np.zeros(centers.shape[0])
    upper = np.ones(centers.shape[0])
    feasible = np.ones(centers.shape[0], dtype=bool)
    for index, alpha in enumerate(along):
        gamma = slack[:, index]
        if alpha > 1e-15:
            lower = np.maximum(lower, gamma / alpha)
        elif alpha < -1e-15:
            upper = np.minimum(upper, gamma / alpha)
        else:
            feasible &= gamma <= 0
    return feasible & (lower <= upper + 1e-12)


def dilate_seeds(
    grid: Grid, seeds: np.ndarray, body: ConvexBody, eps: float
) -> np.ndarray:
    """
    Marks cells whose centre lies in some seed segment dilated by eps*C.

    Args:
        grid: Target grid.
        seeds: Segments (k, 2, n).
        body: Convex body C.
        eps: Dilation scale.

    Returns:
        np.ndarray: Boolean mask with the grid's shape.
    """

    mask = np.zeros(grid.counts, dtype=bool)
    reach = eps * body.circumradius * (1 + 1e-9)
    origin = np.asarray(grid.origin)
    counts = np.asarray(grid.counts)
    h = grid.spacing

    for start, end in seeds:
        lo = np.minimum(start, end) - reach
        hi = np.maximum(start, end) + reach
        first = np.maximum(np.ceil((lo - origin) / h - 0.5).astype(int), 0)
        last = np.minimum(np.floor((hi - origin) / h - 0.5).astype(int), counts - 1)
        if np.any(last < first):
            continue
        axes = [np.arange(f, l + 1) for f, l in zip(first, last)]
        block = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        centers = grid.centers_of(block.reshape(-1, grid.dimension))
        hits = _segment_hits(centers, start, end, body, eps).reshape(block.shape[:-1])
        region = tuple(slice(f, l + 1) for f, l in zip(first, last))
        mask[region] |= hits
    return mask


# Distance transforms


def _brute_field(voxels: VoxelSet, body: ConvexBody) -> np.ndarray:
    grid = voxels.grid
    seeds = np.argwhere(voxels.mask)
    pairs = grid.cell_count * seeds.shape[0]
    if pairs > settings.brute_pair_cap:
        raise ResourceCapError("Brute distance field", pairs, settings.brute_pair_cap)

    cells = np.indices(grid.counts).reshape(grid.dimension, -1).T
    values = np.empty(cells.shape[0])
    chunk = max(1, (1 << 22) // max(1, seeds.shape[0]))
    for begin in range(0, cells.shape[0], chunk):
        block = cells[begin : begin + chunk]
        offsets = block[:, None, :] - seeds[None, :, :]
        values[begin : begin + chunk] = offset_gauge(body, offsets, grid.spacing).min(axis=1)
    return values.reshape(grid.counts)


def _shift_update(target: np.ndarray, source: np.ndarray, shifts, weight: float) -> None:
    t_index, s_index = [], []
    for shift, size in zip(shifts, target.shape):
        t_index.append(slice(max(shift, 0), size + min(shift, 0)))
        s_index.append(slice(max(-shift, 0), size - max(shift, 0)))
    t_index, s_index = tuple(t_index), tuple(s_index)
    np.minimum(target[t_index], source[s_index] + weight, out=target[t_index])


def _forward_sweep(block: np.ndarray, weights: dict, radius: int, level: int, n: int) -> None:
    """One raster-order pass over `block`, the trailing n - level axes."""
    if level == n - 1:
        step = weights[(0,) * (n - 1) + (1,)]
        ramp = step * np.arange(block.shape[0])
        block[:] = np.minimum.accumulate(block - ramp) + ramp
        return

    rest = n - level - 1
    neighbours = [
        (lead, tail)
        for lead in range(1, radius + 1)
        for tail in np.ndindex(*(2 * radius + 1,) * rest)
    ]
    for index in range(block.shape[0]):
        row = block[index]
        for lead, tail in neighbours:
            if index - lead < 0:
                continue
            shifts = tuple(t - radius for t in tail)
            weight = weights[(0,) * level + (lead,) + shifts]
            _shift_update(row, block[index - lead], shifts, weight)
        _forward_sweep(row, weights, radius, level + 1, n)


def _chamfer_field(voxels: VoxelSet, body: ConvexBody, radius: int) -> np.ndarray:
    grid = voxels.grid
    n = grid.dimension
    axes = [np.arange(-radius, radius + 1)] * n
    offsets = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    forward = dict(zip(map(tuple, offsets), offset_gauge(body, offsets, grid.spacing)))
    backward = dict(zip(map(tuple, offsets), offset_gauge(body, -offsets, grid.spacing)))

    values = np.where(voxels.mask, 0.0, np.inf)
    _forward_sweep(values, forward, radius, 0, n)
    flipped = np.flip(values).copy()
    _forward_sweep(flipped, backward, radius, 0, n)
    return np.flip(flipped).copy()


def distance_field(
    voxels: VoxelSet,
    body: ConvexBody,
    method: DistanceMethod = DistanceMethod.BRUTE,
    radius: int = 3,
) -> ScalarField:
    """
    Computes dist_C(x, V) = min over seed cells y of gauge(C, x - y) at cell centres.

    Args:
        voxels: Seed set V.
        body: Convex body C.
        method: BRUTE (exact oracle) or CHAMFER (two sweeps).
        radius: Chamfer neighbourhood radius in cells.

    Returns:
        ScalarField: The distance field, zero exactly on V.

    Raises:
        EmptySeedError: If V is empty.
        ResourceCapError: If the brute pair count exceeds the cap.
    """

    if voxels.count == 0:
        raise EmptySeedError()
    logger.info(
        "Distance field on %s cells with %s seeds, method %s",
        voxels.grid.cell_count,
        voxels.count,
        method.value,
    )
    if method == DistanceMethod.BRUTE:
        values = _brute_field(voxels, body)
    else:
        values = _chamfer_field(voxels, body, radius)
    return ScalarField(voxels.grid, frozen_array(values), body.name, method.value)


def threshold_below(field: ScalarField, eps: float, strict: bool = False) -> VoxelSet:
    if strict:
        mask = field.values < eps
    else:
        mask = field.values <= eps * (1 + CLOSED_SLACK)
    return VoxelSet(field.grid, frozen_array(mask, dtype=bool))


def boundary_voxels(voxels: VoxelSet) -> VoxelSet:
    """
    Cells of V face-adjacent to the complement plus complement cells face-adjacent to V.

    Args:
        voxels: The set V.

    Returns:
        VoxelSet: The two-sided boundary layer.
    """

    structure = ndimage.generate_binary_structure(voxels.grid.dimension, 1)
    mask = voxels.mask
    inner = mask & ~ndimage.binary_erosion(mask, structure, border_value=1)
    outer = ndimage.binary_dilation(mask, structure) & ~mask
    return voxels.with_mask(inner | outer)


# Field dump


def write_field(
    field: ScalarField, path: Union[str, Path], fmt: FieldFormat = FieldFormat.BINARY
) -> Path:
    """
    Writes a distance field: a JSON header line then the values.

    The binary format stores little-endian float64 values in row-major
    order; the CSV format stores one `i0,...,value` row per cell.

    Args:
        field: The field.
        path: Destination file.
        fmt: BINARY or CSV.

    Returns:
        Path: The written file.
    """

    grid = field.grid
    header = FieldHeader(
        dimension=grid.dimension,
        counts=list(grid.counts),
        origin=list(grid.origin),
        spacing=grid.spacing,
        body=field.body_name,
        method=DistanceMethod(field.method),
        format=fmt,
    )
    head = header.model_dump_json() + "\n"
    if fmt == FieldFormat.BINARY:
        payload = head.encode() + np.ascontiguousarray(field.values, dtype="<f8").tobytes()
        return write_atomically(path, payload)

    columns = {f"i{axis}": index.ravel() for axis, index in enumerate(np.indices(grid.counts))}
    columns["value"] = field.values.ravel()
    table = pd.DataFrame(columns).to_csv(index=False, float_format="%.17g")
    return write_atomically(path, head + table)


def read_field(path: Union[str, Path]) -> tuple[FieldHeader, np.ndarray]:
    raw = Path(path).read_bytes()
    head, _, body = raw.partition(b"\n")
    header = FieldHeader.model_validate_json(head)
    if header.format == FieldFormat.BINARY:
        values = np.frombuffer(body, dtype="<f8").reshape(header.counts)
        return header, values

    table = pd.read_csv(io.BytesIO(body))
    values = np.empty(header.counts)
    index = tuple(table[f"i{axis}"].to_numpy() for axis in range(header.dimension))
    values[index] = table["value"].to_numpy(dtype=float)
    return header, values
