# morphomics/services/features.py
"""
Mask -> 3D-morphomics feature vector

resample -> patch -> marching cubes -> clean/simplify -> curvature ->
fixed-window histogram + energy. Surfaces with several components pool
their vertices into one histogram and one energy sum.
"""

import logging
from typing import Optional

import numpy as np

from morphomics.config import PipelineConfig
from morphomics.entities.curvature_field import CurvatureField
from morphomics.entities.features import FeatureVector, HistogramSpec, MeshStats, MorphomicsResult
from morphomics.entities.voxel_grid import VoxelGrid
from morphomics.exceptions import EmptyHistogramError
from morphomics.services.curvature import compute_curvature, mesh_energy
from morphomics.services.meshing import marching_cubes, simplify, validate
from morphomics.services.volume import extract_patch, resample_nearest

logger = logging.getLogger(__name__)


def curvature_histogram(values, spec: Optional[HistogramSpec] = None) -> np.ndarray:
    """
    Probability mass of `values` over equal-width bins on [lo, hi]

    Bins are right-open except the last. Out-of-window values are clamped
    into the edge bins, or dropped when clamping is off.

    Raises:
        EmptyHistogramError: no value left to count
    """
    spec = spec or HistogramSpec()
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if spec.clamp_out_of_range:
        values = np.clip(values, spec.lo, spec.hi)
    else:
        values = values[(values >= spec.lo) & (values <= spec.hi)]
    if values.size == 0:
        raise EmptyHistogramError("empty histogram")

    counts, _ = np.histogram(values, bins=spec.bin_count, range=(spec.lo, spec.hi))
    return counts / counts.sum()


def _binned_quantity(field: CurvatureField, quantity: str) -> np.ndarray:
    return field.angle_defect if quantity == 'gaussian' else field.mean


def _energy(field: CurvatureField, quantity: str) -> float:
    if quantity == 'gaussian':
        return field.total_absolute_defect()
    return mesh_energy(field)


def run_pipeline(grid: VoxelGrid, spec: Optional[HistogramSpec] = None,
                 config: Optional[PipelineConfig] = None) -> MorphomicsResult:
    """
    Run every stage on one mask and keep the intermediate mesh and curvature

    Args:
        grid: binary mask
        spec: histogram window, defaults to 10 bins on [-0.2, 0.2]
        config: pipeline knobs, defaults to 0.625 mm voxels and 64^3 patches

    Returns:
        MorphomicsResult with features, mesh statistics, mesh and curvature
    """
    spec = spec or HistogramSpec()
    config = config or PipelineConfig()

    resampled = resample_nearest(grid, (config.spacing_mm,) * 3)
    patch = extract_patch(resampled, config.patch_side)
    raw_mesh = marching_cubes(patch, config.iso)
    mesh = simplify(
        raw_mesh,
        min_len=config.min_edge_mm,
        max_len=config.max_edge_mm,
        merge_eps=config.merge_eps,
        area_eps=config.area_eps,
        rounds=config.simplify_rounds,
    )
    report = validate(mesh)
    if report.component_count > 1:
        logger.info(f"Pooling {report.component_count} surface components into one histogram")

    field = compute_curvature(mesh, normalize_by_area=config.normalize_by_area)
    bins = curvature_histogram(_binned_quantity(field, config.quantity), spec)
    features = FeatureVector(bins=tuple(bins.tolist()), energy=_energy(field, config.quantity))

    stats = MeshStats(
        vertex_count=mesh.vertex_count,
        face_count=mesh.face_count,
        euler_characteristic=report.euler_characteristic,
        component_count=report.component_count,
        total_mean_curvature=field.total_mean_curvature(),
        total_absolute_defect=field.total_absolute_defect(),
    )
    logger.debug(
        f"Pipeline: {raw_mesh.face_count} -> {mesh.face_count} faces, chi={stats.euler_characteristic}, "
        f"energy={features.energy:.4f}"
    )
    return MorphomicsResult(features=features, stats=stats, mesh=mesh, curvature=field)


def extract_morphomics(grid: VoxelGrid, spec: Optional[HistogramSpec] = None,
                       config: Optional[PipelineConfig] = None) -> FeatureVector:
    """Feature vector of one mask; errors from any stage propagate"""
    return run_pipeline(grid, spec, config).features
