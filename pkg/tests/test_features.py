# tests/test_features.py

import numpy as np
import pytest
from pydantic import ValidationError

from morphomics.config import PipelineConfig
from morphomics.entities import FeatureVector, HistogramSpec, ShapeSpec, VoxelGrid
from morphomics.exceptions import EmptyHistogramError, EmptyMaskError
from morphomics.services.features import curvature_histogram, extract_morphomics, run_pipeline
from morphomics.services.synthkit import rasterize

SPACING = (0.625, 0.625, 0.625)


@pytest.fixture(scope='module')
def sphere_result(sphere_grid):
    return run_pipeline(sphere_grid)


def _extreme_mass(features: FeatureVector) -> float:
    return features.bins[0] + features.bins[-1]


def test_point_mass_at_zero_lands_in_bin_five():
    bins = curvature_histogram(np.zeros(25))
    expected = np.zeros(10)
    expected[5] = 1.0
    assert bins.tolist() == expected.tolist()


def test_out_of_window_values_are_clamped():
    bins = curvature_histogram([-0.3, 0.3])
    assert bins[0] == 0.5
    assert bins[9] == 0.5
    assert bins[1:9].sum() == 0


def test_uniform_samples_fill_bins_evenly():
    values = np.random.default_rng(7).uniform(-0.2, 0.2, size=10_000)
    bins = curvature_histogram(values)

    edges = np.linspace(-0.2, 0.2, 11)
    oracle = np.zeros(10)
    for value in values:
        oracle[min(int(np.searchsorted(edges, value, side='right')) - 1, 9)] += 1
    assert bins == pytest.approx(oracle / len(values))
    assert np.all(np.abs(bins - 0.1) <= 0.01)
    assert bins.sum() == pytest.approx(1.0, abs=1e-12)


def test_last_bin_is_closed():
    spec = HistogramSpec(clamp_out_of_range=False)
    bins = curvature_histogram([0.2, 0.2], spec)
    assert bins[9] == 1.0


def test_dropping_instead_of_clamping():
    spec = HistogramSpec(clamp_out_of_range=False)
    bins = curvature_histogram([-0.5, 0.0, 0.5], spec)
    assert bins[5] == 1.0
    with pytest.raises(EmptyHistogramError, match="empty histogram"):
        curvature_histogram([-1.0, 1.0], spec)


def test_no_values_is_an_empty_histogram():
    with pytest.raises(EmptyHistogramError):
        curvature_histogram([])


def test_custom_window():
    spec = HistogramSpec(bin_count=4, lo=0.0, hi=1.0)
    assert curvature_histogram([0.1, 0.3, 0.6, 0.9], spec).tolist() == [0.25] * 4


def test_histogram_spec_rejects_inverted_window():
    with pytest.raises(ValidationError):
        HistogramSpec(lo=0.2, hi=-0.2)
    with pytest.raises(ValidationError):
        HistogramSpec(bin_count=0)


def test_feature_vector_invariants():
    vector = FeatureVector(bins=(0.25, 0.75), energy=3.0)
    assert vector.names == ['bin_0', 'bin_1', 'energy']
    assert vector.as_row('n1', 1) == {'id': 'n1', 'bin_0': 0.25, 'bin_1': 0.75, 'energy': 3.0, 'label': 1}
    with pytest.raises(ValidationError):
        FeatureVector(bins=(0.5, 0.6), energy=1.0)
    with pytest.raises(ValidationError):
        FeatureVector(bins=(1.0,), energy=-0.1)


def test_sphere_is_biased_to_positive_curvature(sphere_result):
    bins = np.array(sphere_result.features.bins)
    assert len(bins) == 10
    assert bins[5:].sum() > bins[:5].sum()
    assert sphere_result.stats.euler_characteristic == 2
    assert sphere_result.stats.component_count == 1
    assert sphere_result.features.energy >= sphere_result.stats.total_mean_curvature


def test_sphere_energy_matches_curvature_field(sphere_result):
    assert sphere_result.features.energy == pytest.approx(np.abs(sphere_result.curvature.mean).sum())
    assert sphere_result.curvature.total_angle_defect() == pytest.approx(4.0 * np.pi, rel=1e-6)


def test_extraction_is_deterministic(sphere_grid, sphere_result):
    again = extract_morphomics(sphere_grid)
    assert again == sphere_result.features


def test_spikes_raise_extreme_bin_mass():
    sphere = rasterize(ShapeSpec(kind='sphere', radius_mm=8.0), SPACING, (48,) * 3)
    spiky = rasterize(
        ShapeSpec(kind='spiky_sphere', radius_mm=8.0, spike_count=12, spike_height_mm=3.0,
                  spike_width_mm=1.5, seed=3),
        SPACING, (48,) * 3,
    )
    ellipsoid = rasterize(ShapeSpec(kind='ellipsoid', semi_axes_mm=(9.0, 8.0, 7.5)), SPACING, (48,) * 3)

    spiky_mass = _extreme_mass(extract_morphomics(spiky))
    assert spiky_mass > _extreme_mass(extract_morphomics(sphere))
    assert spiky_mass > _extreme_mass(extract_morphomics(ellipsoid))


def test_gaussian_quantity_bins_angle_defect(sphere_grid):
    result = run_pipeline(sphere_grid, config=PipelineConfig(quantity='gaussian'))
    assert result.features.energy == pytest.approx(result.curvature.total_absolute_defect())
    assert result.features.energy >= 4.0 * np.pi - 1e-6
    assert sum(result.features.bins) == pytest.approx(1.0, abs=1e-12)


def test_components_are_pooled():
    data = np.zeros((48, 24, 24), dtype=bool)
    x, y, z = np.ogrid[:48, :24, :24]
    for cx in (12, 34):
        data |= (x - cx) ** 2 + (y - 12) ** 2 + (z - 12) ** 2 <= 25
    grid = VoxelGrid.from_array(data, spacing=SPACING)

    result = run_pipeline(grid)
    assert result.stats.component_count == 2
    assert result.stats.euler_characteristic == 4
    assert sum(result.features.bins) == pytest.approx(1.0, abs=1e-12)
    assert result.curvature.total_angle_defect() == pytest.approx(8.0 * np.pi, rel=1e-6)


def test_empty_mask_propagates():
    with pytest.raises(EmptyMaskError):
        extract_morphomics(VoxelGrid.from_array(np.zeros((8, 8, 8)), spacing=SPACING))
