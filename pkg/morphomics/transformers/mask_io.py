# morphomics/transformers/mask_io.py
"""
Mask readers and writers

- NRRD (.nrrd / .nhdr): 3D, raw or gzip encoding, spacing from the
  `space directions` diagonal (or `spacings`), `space origin`.
- Raw + sidecar (.raw): little-endian uint8 stream, x-fastest, with a JSON
  sidecar `<stem>.json` holding {dims, spacing_mm, origin_mm}.
"""

import json
import logging
from pathlib import Path
from typing import Union

import nrrd
import numpy as np

from morphomics.entities.voxel_grid import VoxelGrid
from morphomics.exceptions import MaskFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

NRRD_SUFFIXES = ('.nrrd', '.nhdr')
RAW_SUFFIXES = ('.raw',)
MASK_SUFFIXES = NRRD_SUFFIXES + RAW_SUFFIXES


def sidecar_path(path: PathLike) -> Path:
    return Path(path).with_suffix('.json')


def is_mask_file(path: PathLike) -> bool:
    return Path(path).suffix.lower() in MASK_SUFFIXES


def _spacing_from_header(header: dict) -> tuple:
    directions = header.get('space directions')
    if directions is not None:
        directions = np.asarray(directions, dtype=np.float64)
        if directions.shape != (3, 3) or not np.all(np.isfinite(directions)):
            raise MaskFormatError(f"unsupported 'space directions': {header.get('space directions')}")
        off_diagonal = directions - np.diag(np.diag(directions))
        if np.any(off_diagonal != 0):
            raise MaskFormatError("only axis-aligned 'space directions' are supported")
        return tuple(float(abs(d)) for d in np.diag(directions))
    spacings = header.get('spacings')
    if spacings is not None:
        return tuple(float(s) for s in spacings)
    raise MaskFormatError("missing spacing metadata ('space directions' or 'spacings')")


def _load_nrrd(path: Path) -> VoxelGrid:
    try:
        data, header = nrrd.read(str(path))
    except (nrrd.NRRDError, OSError) as e:
        raise MaskFormatError(f"cannot read NRRD {path}: {str(e)}") from e

    if data.ndim != 3:
        raise MaskFormatError(f"{path} holds {data.ndim}D data, expected 3D")
    encoding = header.get('encoding', 'raw')
    if encoding not in ('raw', 'gzip', 'gz'):
        raise MaskFormatError(f"unsupported NRRD encoding {encoding!r}")

    spacing = _spacing_from_header(header)
    origin = tuple(float(o) for o in header.get('space origin', (0.0, 0.0, 0.0)))
    return VoxelGrid(dims=data.shape, spacing=spacing, origin=origin, data=data)


def _load_raw(path: Path) -> VoxelGrid:
    meta_path = sidecar_path(path)
    try:
        meta = json.loads(meta_path.read_text(encoding='utf-8'))
        dims = tuple(int(d) for d in meta['dims'])
        spacing = tuple(float(s) for s in meta['spacing_mm'])
        origin = tuple(float(o) for o in meta.get('origin_mm', (0.0, 0.0, 0.0)))
    except FileNotFoundError as e:
        raise MaskFormatError(f"missing sidecar {meta_path}") from e
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise MaskFormatError(f"malformed sidecar {meta_path}: {str(e)}") from e

    if len(dims) != 3 or len(spacing) != 3 or len(origin) != 3:
        raise MaskFormatError(f"sidecar {meta_path} must describe 3 axes")

    try:
        stream = np.fromfile(path, dtype='<u1')
    except OSError as e:
        raise MaskFormatError(f"cannot read {path}: {str(e)}") from e
    if stream.size != int(np.prod(dims)):
        raise MaskFormatError(
            f"{path} holds {stream.size} bytes but sidecar dims {dims} need {int(np.prod(dims))}"
        )
    data = stream.reshape(dims, order='F')
    return VoxelGrid(dims=dims, spacing=spacing, origin=origin, data=data)


def load_mask(path: PathLike) -> VoxelGrid:
    """
    Read a binary mask; nonzero voxels become occupied

    Raises:
        MaskFormatError: unreadable file, unsupported encoding, non-3D data
            or missing spacing metadata
    """
    path = Path(path)
    suffix = path.suffix.lower()
    try:
        if suffix in NRRD_SUFFIXES:
            grid = _load_nrrd(path)
        elif suffix in RAW_SUFFIXES:
            grid = _load_raw(path)
        else:
            raise MaskFormatError(f"unsupported mask format {suffix!r} for {path}")
    except MaskFormatError:
        raise
    except ValueError as e:
        # entity validation failures (bad spacing, shape mismatch)
        raise MaskFormatError(f"invalid mask {path}: {str(e)}") from e

    logger.debug(f"Loaded {path.name}: dims={grid.dims} spacing={grid.spacing} occupied={grid.occupied_count}")
    return grid


def write_mask(grid: VoxelGrid, path: PathLike, compress: bool = True) -> Path:
    """Write a mask as NRRD or raw + sidecar, chosen by suffix"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    suffix = path.suffix.lower()

    if suffix in NRRD_SUFFIXES:
        header = {
            'space': 'left-posterior-superior',
            'space directions': np.diag(grid.spacing),
            'space origin': np.asarray(grid.origin, dtype=np.float64),
            'encoding': 'gzip' if compress else 'raw',
        }
        nrrd.write(str(path), grid.data.astype(np.uint8), header)
    elif suffix in RAW_SUFFIXES:
        grid.linear_data().astype('<u1').tofile(path)
        meta = {
            'dims': list(grid.dims),
            'spacing_mm': list(grid.spacing),
            'origin_mm': list(grid.origin),
        }
        sidecar_path(path).write_text(json.dumps(meta, indent=2), encoding='utf-8')
    else:
        raise MaskFormatError(f"unsupported mask format {suffix!r} for {path}")
    return path
