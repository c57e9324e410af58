# morphomics/services/volume.py
"""
Mask volume preparation: isotropic nearest-neighbour resampling, barycenter
and fixed-size patch extraction around it.
"""

import logging
from typing import Sequence, Tuple

import numpy as np

from morphomics.entities.voxel_grid import VoxelGrid
from morphomics.exceptions import EmptyMaskError

logger = logging.getLogger(__name__)

DEFAULT_SPACING_MM = 0.625
DEFAULT_PATCH_SIDE = 64

# keeps exact midpoints on the lower index despite float noise
_TIE_EPS = 1e-9


def _require_occupied(grid: VoxelGrid) -> None:
    if grid.is_empty:
        raise EmptyMaskError("mask has no occupied voxel")


def _nearest_indices(n_in: int, spacing_in: float, spacing_out: float) -> np.ndarray:
    """Input index nearest to each output voxel centre along one axis"""
    n_out = max(1, int(round(n_in * spacing_in / spacing_out)))
    # both grids share the low edge of the physical extent
    position = (np.arange(n_out) + 0.5) * spacing_out / spacing_in - 0.5
    index = np.ceil(position - 0.5 - _TIE_EPS).astype(np.int64)
    return np.clip(index, 0, n_in - 1)


def resample_nearest(grid: VoxelGrid,
                     target_spacing: Sequence[float] = (DEFAULT_SPACING_MM,) * 3) -> VoxelGrid:
    """
    Resample a mask to `target_spacing` with nearest-neighbour lookup

    Args:
        grid: source mask
        target_spacing: output voxel size per axis (mm)

    Returns:
        VoxelGrid covering the same physical extent
    """
    target = tuple(float(s) for s in target_spacing)
    if len(target) != 3 or any(s <= 0 for s in target):
        raise ValueError(f"target spacing must be 3 positive values, got {target_spacing}")
    _require_occupied(grid)

    if target == grid.spacing:
        return grid

    axes = [
        _nearest_indices(n, s_in, s_out)
        for n, s_in, s_out in zip(grid.dims, grid.spacing, target)
    ]
    data = grid.data[np.ix_(*axes)]
    origin = tuple(
        o - 0.5 * s_in + 0.5 * s_out
        for o, s_in, s_out in zip(grid.origin, grid.spacing, target)
    )
    logger.debug(f"Resampled {grid.dims} @ {grid.spacing} -> {data.shape} @ {target}")
    return VoxelGrid(dims=data.shape, spacing=target, origin=origin, data=data)


def barycenter(grid: VoxelGrid) -> Tuple[float, float, float]:
    """Unweighted mean of occupied voxel indices (continuous voxel coordinates)"""
    _require_occupied(grid)
    center = np.argwhere(grid.data).mean(axis=0)
    return tuple(float(c) for c in center)


def round_half_away(values) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    return (np.sign(values) * np.floor(np.abs(values) + 0.5)).astype(np.int64)


def extract_patch(grid: VoxelGrid, side: int = DEFAULT_PATCH_SIDE) -> VoxelGrid:
    """
    Cut a side^3 patch whose centre voxel is the rounded barycenter

    Regions outside the source are zero-padded; spacing is preserved and the
    origin moves to the patch's first voxel.
    """
    if side < 1:
        raise ValueError(f"patch side must be positive, got {side}")
    center = round_half_away(barycenter(grid))
    start = center - side // 2
    stop = start + side

    patch = np.zeros((side, side, side), dtype=bool)
    src_lo = np.maximum(start, 0)
    src_hi = np.minimum(stop, np.asarray(grid.dims))
    if np.all(src_hi > src_lo):
        dst_lo = src_lo - start
        dst_hi = src_hi - start
        patch[dst_lo[0]:dst_hi[0], dst_lo[1]:dst_hi[1], dst_lo[2]:dst_hi[2]] = \
            grid.data[src_lo[0]:src_hi[0], src_lo[1]:src_hi[1], src_lo[2]:src_hi[2]]

    origin = tuple(float(o + s * i) for o, s, i in zip(grid.origin, grid.spacing, start))
    kept = int(np.count_nonzero(patch))
    if kept < grid.occupied_count:
        logger.warning(f"Patch of side {side} keeps {kept} of {grid.occupied_count} occupied voxels")
    return VoxelGrid(dims=(side, side, side), spacing=grid.spacing, origin=origin, data=patch)
