# tests/conftest.py

import numpy as np
import pytest
import trimesh

from morphomics.entities import ShapeSpec, TriangleMesh, VoxelGrid
from morphomics.services.synthkit import rasterize

# outward counter-clockwise quads of the unit cube; vertex i sits at (i & 1, i >> 1 & 1, i >> 2 & 1)
CUBE_QUADS = [
    (0, 2, 3, 1),
    (4, 5, 7, 6),
    (0, 1, 5, 4),
    (2, 6, 7, 3),
    (0, 4, 6, 2),
    (1, 3, 7, 5),
]


def _cube_vertices():
    return np.array([(i & 1, (i >> 1) & 1, (i >> 2) & 1) for i in range(8)], dtype=np.float64)


@pytest.fixture
def unit_cube() -> TriangleMesh:
    """12-triangle unit cube"""
    faces = []
    for a, b, c, d in CUBE_QUADS:
        faces += [(a, b, c), (a, c, d)]
    return TriangleMesh(vertices=_cube_vertices(), triangles=faces)


@pytest.fixture
def centred_cube() -> TriangleMesh:
    """Unit cube whose faces are fans around an added face-centre vertex"""
    vertices = list(_cube_vertices())
    faces = []
    for quad in CUBE_QUADS:
        centre = len(vertices)
        vertices.append(np.mean([vertices[v] for v in quad], axis=0))
        for k in range(4):
            faces.append((quad[k], quad[(k + 1) % 4], centre))
    return TriangleMesh(vertices=np.array(vertices), triangles=faces)


@pytest.fixture
def tetrahedron() -> TriangleMesh:
    """Closed tetrahedron whose A-B edge (1.5) is its only edge longer than 1"""
    vertices = np.array([
        (-0.75, 0.0, 0.0),
        (0.75, 0.0, 0.0),
        (0.0, 0.45, 0.3),
        (0.0, -0.45, 0.3),
    ])
    mesh = TriangleMesh(vertices=vertices, triangles=[(0, 2, 1), (0, 1, 3), (0, 3, 2), (1, 2, 3)])
    return mesh.flipped() if mesh.signed_volume() < 0 else mesh


@pytest.fixture
def make_icosphere():
    def build(subdivisions: int = 3, radius: float = 1.0) -> TriangleMesh:
        sphere = trimesh.creation.icosphere(subdivisions=subdivisions, radius=radius)
        mesh = TriangleMesh(vertices=sphere.vertices, triangles=sphere.faces)
        return mesh.flipped() if mesh.signed_volume() < 0 else mesh
    return build


@pytest.fixture
def make_ball():
    """Solid ball of `radius` voxels centred in a cube grid"""
    def build(radius: float, dims: int, spacing=(1.0, 1.0, 1.0), center=None) -> VoxelGrid:
        center = np.full(3, (dims - 1) / 2.0) if center is None else np.asarray(center, dtype=np.float64)
        x, y, z = np.ogrid[:dims, :dims, :dims]
        data = (x - center[0]) ** 2 + (y - center[1]) ** 2 + (z - center[2]) ** 2 <= radius ** 2
        return VoxelGrid.from_array(data, spacing=spacing)
    return build


@pytest.fixture(scope='session')
def sphere_grid() -> VoxelGrid:
    """r = 10 mm sphere at 0.625 mm voxels"""
    return rasterize(ShapeSpec(kind='sphere', radius_mm=10.0), spacing=(0.625,) * 3, dims=(40,) * 3)


@pytest.fixture
def run_in_tmp(tmp_path, monkeypatch):
    """Run with tmp_path as working directory so run logs stay there"""
    monkeypatch.chdir(tmp_path)
    return tmp_path
