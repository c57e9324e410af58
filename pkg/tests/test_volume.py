# tests/test_volume.py

import numpy as np
import pytest

from morphomics.entities import VoxelGrid
from morphomics.exceptions import EmptyMaskError
from morphomics.services.volume import barycenter, extract_patch, resample_nearest, round_half_away


def _brute_force_resample(grid: VoxelGrid, target):
    """Nearest input centre per output centre, ties to the lower index"""
    dims_out = [max(1, int(round(n * s / t))) for n, s, t in zip(grid.dims, grid.spacing, target)]
    out = np.zeros(dims_out, dtype=bool)
    for i in range(dims_out[0]):
        for j in range(dims_out[1]):
            for k in range(dims_out[2]):
                index = []
                for axis, q in enumerate((i, j, k)):
                    position = (q + 0.5) * target[axis]
                    centres = (np.arange(grid.dims[axis]) + 0.5) * grid.spacing[axis]
                    index.append(int(np.argmin(np.abs(centres - position) + 1e-12 * np.arange(len(centres)))))
                out[i, j, k] = grid.data[tuple(index)]
    return out


def test_resample_same_spacing_is_identity():
    data = np.random.default_rng(0).random((6, 7, 8)) > 0.5
    grid = VoxelGrid.from_array(data, spacing=(0.625, 0.625, 0.625), origin=(1.0, 2.0, 3.0))
    resampled = resample_nearest(grid, (0.625, 0.625, 0.625))
    assert resampled.same_as(grid)


def test_resample_to_half_spacing_multiplies_count_by_eight():
    data = np.random.default_rng(1).random((10, 10, 10)) > 0.6
    grid = VoxelGrid.from_array(data)
    resampled = resample_nearest(grid, (0.5, 0.5, 0.5))
    assert resampled.dims == (20, 20, 20)
    assert resampled.occupied_count == 8 * grid.occupied_count
    assert np.array_equal(resampled.data, _brute_force_resample(grid, (0.5, 0.5, 0.5)))


def test_resample_matches_brute_force_on_anisotropic_grid():
    data = np.random.default_rng(2).random((7, 5, 6)) > 0.5
    grid = VoxelGrid.from_array(data, spacing=(1.0, 1.3, 0.8))
    target = (0.7, 0.9, 1.1)
    resampled = resample_nearest(grid, target)
    assert np.array_equal(resampled.data, _brute_force_resample(grid, target))


def test_resample_tie_goes_to_lower_index():
    data = np.zeros((4, 1, 1), dtype=bool)
    data[[1, 3], 0, 0] = True
    grid = VoxelGrid.from_array(data)
    # output centres fall exactly between input centres 0|1 and 2|3
    assert not resample_nearest(grid, (2.0, 1.0, 1.0)).data.any()

    data = np.zeros((4, 1, 1), dtype=bool)
    data[[0, 2], 0, 0] = True
    assert resample_nearest(VoxelGrid.from_array(data), (2.0, 1.0, 1.0)).data.all()


def test_resample_ball_preserves_volume(make_ball):
    grid = make_ball(radius=5.0, dims=14)
    resampled = resample_nearest(grid, (0.7, 0.7, 0.7))
    before = grid.occupied_count * grid.voxel_volume
    after = resampled.occupied_count * resampled.voxel_volume
    shell = 4.0 * np.pi * 5.0 ** 2 * 1.0
    assert abs(after - before) < shell


def test_resample_keeps_physical_frame():
    grid = VoxelGrid.from_array(np.ones((4, 4, 4)), spacing=(1.0, 1.0, 1.0), origin=(10.0, 0.0, 0.0))
    resampled = resample_nearest(grid, (0.5, 0.5, 0.5))
    # low edge of the extent stays at origin - spacing / 2
    assert resampled.origin == pytest.approx((9.75, -0.25, -0.25))


def test_resample_rejects_empty_grid_and_bad_spacing():
    grid = VoxelGrid.from_array(np.zeros((3, 3, 3)))
    with pytest.raises(EmptyMaskError):
        resample_nearest(grid, (0.5, 0.5, 0.5))
    with pytest.raises(ValueError):
        resample_nearest(VoxelGrid.from_array(np.ones((3, 3, 3))), (0.5, 0.0, 0.5))


def test_barycenter_single_voxel_and_pair():
    data = np.zeros((8, 8, 8), dtype=bool)
    data[3, 5, 7] = True
    assert barycenter(VoxelGrid.from_array(data)) == (3.0, 5.0, 7.0)

    data = np.zeros((4, 4, 4), dtype=bool)
    data[0, 0, 0] = data[2, 0, 0] = True
    assert barycenter(VoxelGrid.from_array(data)) == (1.0, 0.0, 0.0)


def test_barycenter_of_centred_ball(make_ball):
    center = barycenter(make_ball(radius=4.0, dims=15))
    assert np.allclose(center, 7.0, atol=0.5)


def test_barycenter_translation_equivariance():
    rng = np.random.default_rng(3)
    data = np.zeros((20, 20, 20), dtype=bool)
    data[2:8, 3:6, 4:9] = rng.random((6, 3, 5)) > 0.3
    shifted = np.roll(data, shift=(5, 2, 7), axis=(0, 1, 2))
    a = np.array(barycenter(VoxelGrid.from_array(data)))
    b = np.array(barycenter(VoxelGrid.from_array(shifted)))
    assert np.allclose(b - a, (5, 2, 7))


def test_barycenter_of_empty_grid_fails():
    with pytest.raises(EmptyMaskError):
        barycenter(VoxelGrid.from_array(np.zeros((2, 2, 2))))


def test_round_half_away_from_zero():
    assert round_half_away([0.5, 1.5, 2.5, -0.5, 2.4]).tolist() == [1, 2, 3, -1, 2]


def test_patch_contains_centred_mask(make_ball):
    grid = make_ball(radius=10.0, dims=128, center=(60.0, 64.0, 70.0))
    patch = extract_patch(grid, 64)
    assert patch.dims == (64, 64, 64)
    assert patch.occupied_count == grid.occupied_count


def test_patch_pads_mask_at_grid_corner():
    data = np.zeros((20, 20, 20), dtype=bool)
    data[0:3, 0:3, 0:3] = True
    grid = VoxelGrid.from_array(data, spacing=(0.5, 0.5, 0.5), origin=(1.0, 1.0, 1.0))
    patch = extract_patch(grid, 8)
    assert patch.occupied_count == 27
    # barycenter (1, 1, 1) -> start at -3, so the block begins at patch index 3
    assert patch.data[3:6, 3:6, 3:6].all()
    assert patch.origin == pytest.approx((-0.5, -0.5, -0.5))
    assert patch.spacing == grid.spacing


def test_patch_side_one_is_rounded_barycenter_voxel():
    data = np.zeros((5, 5, 5), dtype=bool)
    data[1, 2, 2] = data[2, 2, 2] = True
    patch = extract_patch(VoxelGrid.from_array(data), 1)
    # barycenter x = 1.5 rounds away from zero to 2
    assert patch.dims == (1, 1, 1)
    assert patch.data[0, 0, 0]
    assert patch.origin == (2.0, 2.0, 2.0)


def test_patch_keeps_in_range_voxel_values():
    rng = np.random.default_rng(4)
    data = rng.random((30, 30, 30)) > 0.7
    grid = VoxelGrid.from_array(data, spacing=(0.625, 0.625, 0.625))
    patch = extract_patch(grid, 16)
    start = np.rint((np.array(patch.origin) - np.array(grid.origin)) / 0.625).astype(int)
    assert np.array_equal(patch.data, data[start[0]:start[0] + 16, start[1]:start[1] + 16, start[2]:start[2] + 16])


def test_patch_of_empty_grid_fails():
    with pytest.raises(EmptyMaskError):
        extract_patch(VoxelGrid.from_array(np.zeros((4, 4, 4))), 2)
