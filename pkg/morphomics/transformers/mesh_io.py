# morphomics/transformers/mesh_io.py
"""
Mesh and per-vertex curvature export

- ASCII OFF read/write and binary STL export, through trimesh with
  processing disabled so vertex order and indices survive.
- Curvature CSV: vertex_index,x,y,z,mean_curvature,angle_defect
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
import trimesh

from morphomics.entities.curvature_field import CurvatureField
from morphomics.entities.triangle_mesh import TriangleMesh

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

CURVATURE_COLUMNS = ['vertex_index', 'x', 'y', 'z', 'mean_curvature', 'angle_defect']


def _as_trimesh(mesh: TriangleMesh) -> trimesh.Trimesh:
    return trimesh.Trimesh(vertices=np.array(mesh.vertices), faces=np.array(mesh.triangles), process=False)


def write_off(mesh: TriangleMesh, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _as_trimesh(mesh).export(path, file_type='off')
    return path


def read_off(path: PathLike) -> TriangleMesh:
    """Load an OFF file; raises ValueError on anything that is not a triangle mesh"""
    loaded = trimesh.load(str(path), file_type='off', process=False, force='mesh')
    if not isinstance(loaded, trimesh.Trimesh):
        raise ValueError(f"{path} does not hold a single triangle mesh")
    return TriangleMesh(vertices=loaded.vertices, triangles=loaded.faces)


def write_stl(mesh: TriangleMesh, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _as_trimesh(mesh).export(path, file_type='stl')
    return path


def write_curvature_csv(mesh: TriangleMesh, field: CurvatureField, path: PathLike) -> Path:
    if mesh.vertex_count != field.vertex_count:
        raise ValueError("curvature field does not belong to the mesh")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({
        'vertex_index': np.arange(mesh.vertex_count),
        'x': mesh.vertices[:, 0],
        'y': mesh.vertices[:, 1],
        'z': mesh.vertices[:, 2],
        'mean_curvature': field.mean,
        'angle_defect': field.angle_defect,
    }, columns=CURVATURE_COLUMNS)
    frame.to_csv(path, index=False, encoding='utf-8')
    logger.debug(f"Wrote curvature of {mesh.vertex_count} vertices to {path}")
    return path
