# morphomics/services/synthkit.py
"""
Synthetic nodule-like masks

Shapes are star-shaped solids centred in the grid. A voxel is occupied when
its centre lies within the surface radius along its direction:

    R(u) = base(u) + height * max_k exp(-angle(u, d_k)^2 / (2 sigma^2)) + jitter(u)

with base(u) the ellipsoid radius, d_k seeded bump directions and sigma the
bump width expressed as an angle on the base sphere. Benign corpus members
are jittered ellipsoids; malignant ones are spiky or lobulated spheres. Each
benign member takes the volume of an independently drawn malignant shape, so
the two classes share one volume distribution.
"""

import logging
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np

from morphomics.entities.shape import ShapeSpec
from morphomics.entities.voxel_grid import VoxelGrid
from morphomics.helpers.seeding import derive_seed
from morphomics.transformers.mask_io import write_mask
from morphomics.transformers.table_io import write_labels

logger = logging.getLogger(__name__)

CORPUS_SPACING_MM = 0.625
CORPUS_DIMS = 56
MARGIN_VOXELS = 2

JITTER_BUMPS = 8
JITTER_WIDTH_RAD = 0.6
LOBULATED_SHARE = 0.3
VOLUME_DIRECTIONS = 4000


def _random_directions(rng: np.random.Generator, count: int) -> np.ndarray:
    directions = rng.normal(size=(count, 3))
    return directions / np.linalg.norm(directions, axis=1, keepdims=True)


def _fibonacci_directions(count: int) -> np.ndarray:
    """Near-uniform unit directions on a golden-angle spiral"""
    k = np.arange(count) + 0.5
    z = 1.0 - 2.0 * k / count
    azimuth = np.pi * (3.0 - np.sqrt(5.0)) * k
    ring = np.sqrt(1.0 - z * z)
    return np.stack([ring * np.cos(azimuth), ring * np.sin(azimuth), z], axis=1)


def _bump_profile(units: np.ndarray, directions: np.ndarray, width_rad: float) -> np.ndarray:
    """Gaussian of the angle to each direction, (N, K)"""
    angles = np.arccos(np.clip(units @ directions.T, -1.0, 1.0))
    return np.exp(-angles ** 2 / (2.0 * width_rad ** 2))


def surface_radius(spec: ShapeSpec, units: np.ndarray) -> np.ndarray:
    """Surface radius (mm) along each unit direction"""
    axes = np.asarray(spec.base_axes())
    radius = 1.0 / np.sqrt(np.sum((units / axes) ** 2, axis=1))

    rng = np.random.default_rng(spec.seed)
    if spec.has_bumps:
        directions = _random_directions(rng, spec.spike_count)
        width = spec.spike_width_mm / float(np.mean(axes))
        radius = radius + spec.spike_height_mm * _bump_profile(units, directions, width).max(axis=1)
    if spec.jitter_mm > 0:
        directions = _random_directions(rng, JITTER_BUMPS)
        signs = rng.choice((-1.0, 1.0), size=JITTER_BUMPS)
        # tanh keeps the jitter within +/- jitter_mm
        radius = radius + spec.jitter_mm * np.tanh(_bump_profile(units, directions, JITTER_WIDTH_RAD) @ signs)
    return radius


def nominal_volume(spec: ShapeSpec, directions: int = VOLUME_DIRECTIONS) -> float:
    """Continuous volume (mm^3) of the star-shaped solid, 4pi/3 times the mean cubed radius"""
    radius = surface_radius(spec, _fibonacci_directions(directions))
    return float(4.0 * np.pi / 3.0 * np.mean(radius ** 3))


def grid_origin(spacing: Sequence[float], dims: Sequence[int]) -> Tuple[float, float, float]:
    """Origin that puts the world origin at the grid centre"""
    return tuple(-0.5 * (d - 1) * s for s, d in zip(spacing, dims))


def rasterize(spec: ShapeSpec, spacing: Sequence[float] = (CORPUS_SPACING_MM,) * 3,
              dims: Sequence[int] = (CORPUS_DIMS,) * 3) -> VoxelGrid:
    """
    Occupancy of the shape sampled at voxel centres

    Raises:
        ValueError: the shape plus a two-voxel margin does not fit in the grid
    """
    spacing = tuple(float(s) for s in spacing)
    dims = tuple(int(d) for d in dims)
    half_extent = min(0.5 * (d - 1) * s for s, d in zip(spacing, dims))
    needed = spec.max_extent_mm() + MARGIN_VOXELS * max(spacing)
    if needed > half_extent:
        raise ValueError(f"shape exceeds grid: needs {needed:.3f} mm of half-extent, grid has {half_extent:.3f} mm")

    origin = grid_origin(spacing, dims)
    axes = [o + s * np.arange(d) for o, s, d in zip(origin, spacing, dims)]
    points = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, 3)
    distance = np.linalg.norm(points, axis=1)

    units = np.zeros_like(points)
    away = distance > 0
    units[away] = points[away] / distance[away, None]
    units[~away] = (0.0, 0.0, 1.0)

    inside = distance <= surface_radius(spec, units)
    data = inside.reshape(dims)
    return VoxelGrid(dims=dims, spacing=spacing, origin=origin, data=data)


def _benign_spec(rng: np.random.Generator, seed: int) -> ShapeSpec:
    shadow = _malignant_spec(rng, seed)
    radius = float(np.cbrt(3.0 * nominal_volume(shadow) / (4.0 * np.pi)))
    ratios = rng.uniform(0.85, 1.15, size=3)
    # unit product keeps the ellipsoid volume at 4pi/3 radius^3
    ratios = ratios / np.cbrt(np.prod(ratios))
    return ShapeSpec(
        kind='ellipsoid',
        radius_mm=radius,
        semi_axes_mm=tuple(float(r) for r in radius * ratios),
        jitter_mm=rng.uniform(0.2, 0.4),
        seed=seed,
    )


def _malignant_spec(rng: np.random.Generator, seed: int) -> ShapeSpec:
    if rng.random() < LOBULATED_SHARE:
        return ShapeSpec(
            kind='lobulated',
            radius_mm=rng.uniform(4.5, 9.0),
            spike_count=int(rng.integers(4, 9)),
            spike_height_mm=rng.uniform(2.5, 4.0),
            spike_width_mm=rng.uniform(2.5, 3.5),
            jitter_mm=rng.uniform(0.2, 0.4),
            seed=seed,
        )
    return ShapeSpec(
        kind='spiky_sphere',
        radius_mm=rng.uniform(4.5, 9.0),
        spike_count=int(rng.integers(8, 19)),
        spike_height_mm=rng.uniform(2.5, 4.0),
        spike_width_mm=rng.uniform(1.5, 2.0),
        jitter_mm=rng.uniform(0.2, 0.4),
        seed=seed,
    )


def corpus_specs(n_benign: int, n_malignant: int, seed: int = 0) -> List[Tuple[ShapeSpec, int]]:
    """Shape specs and labels, benign members first"""
    if n_benign < 1 or n_malignant < 1:
        raise ValueError(f"corpus needs at least one member per class, got {n_benign} and {n_malignant}")
    members = []
    for index in range(n_benign + n_malignant):
        label = int(index >= n_benign)
        rng = np.random.default_rng(derive_seed(seed, 'corpus', index))
        shape_seed = derive_seed(seed, 'surface', index)
        spec = _malignant_spec(rng, shape_seed) if label else _benign_spec(rng, shape_seed)
        members.append((spec, label))
    return members


def make_corpus(n_benign: int, n_malignant: int, seed: int = 0,
                spacing: Sequence[float] = (CORPUS_SPACING_MM,) * 3,
                dims: Sequence[int] = (CORPUS_DIMS,) * 3) -> List[Tuple[VoxelGrid, int]]:
    """Rasterized corpus as (grid, label) pairs"""
    return [(rasterize(spec, spacing, dims), label) for spec, label in corpus_specs(n_benign, n_malignant, seed)]


def corpus_id(index: int) -> str:
    return f"nodule_{index:04d}"


def write_corpus(out_dir: Union[str, Path], n_benign: int, n_malignant: int, seed: int = 0,
                 spacing: Sequence[float] = (CORPUS_SPACING_MM,) * 3,
                 dims: Sequence[int] = (CORPUS_DIMS,) * 3) -> Path:
    """
    Write each member as `<id>.nrrd` plus `labels.csv` (id,label,kind,seed)

    Returns:
        path of labels.csv
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for index, (spec, label) in enumerate(corpus_specs(n_benign, n_malignant, seed)):
        sample_id = corpus_id(index)
        write_mask(rasterize(spec, spacing, dims), out_dir / f"{sample_id}.nrrd")
        rows.append({'id': sample_id, 'label': label, 'kind': spec.kind, 'seed': spec.seed})
        logger.debug(f"Wrote {sample_id} ({spec.kind}, label {label})")

    labels_path = write_labels(rows, out_dir / 'labels.csv')
    logger.info(f"Synthesized {len(rows)} masks into {out_dir}")
    return labels_path
