# tests/test_remeshing.py

import numpy as np
import pytest

from morphomics.entities import TriangleMesh
from morphomics.services.meshing import marching_cubes, validate
from morphomics.services.remeshing import collapse_short_edges, split_long_edges


def _with_sliver(mesh: TriangleMesh, length: float = 0.01):
    """Move vertex 0 to within `length` of its first neighbour"""
    a = 0
    face = next(f for f in mesh.triangles if a in f)
    b = int(next(v for v in face if v != a))
    vertices = np.array(mesh.vertices)
    direction = vertices[a] - vertices[b]
    vertices[a] = vertices[b] + length * direction / np.linalg.norm(direction)
    return TriangleMesh(vertices=vertices, triangles=mesh.triangles), a, b


def test_operations_are_no_ops_without_qualifying_edges(make_icosphere):
    mesh = make_icosphere(2)
    lengths = mesh.edge_lengths()
    assert collapse_short_edges(mesh, min_len=0.5 * lengths.min()) is mesh
    assert split_long_edges(mesh, max_len=2.0 * lengths.max()) is mesh


def test_collapse_removes_single_sliver_edge(make_icosphere):
    mesh, a, b = _with_sliver(make_icosphere(1))
    midpoint = 0.5 * (mesh.vertices[a] + mesh.vertices[b])

    collapsed = collapse_short_edges(mesh, min_len=0.05)

    assert collapsed.vertex_count == mesh.vertex_count - 1
    assert collapsed.face_count == mesh.face_count - 2
    assert np.min(np.linalg.norm(collapsed.vertices - midpoint, axis=1)) < 1e-12
    report = validate(collapsed)
    assert report.is_valid_surface
    assert report.euler_characteristic == 2
    assert collapsed.signed_volume() > 0


def test_collapse_on_marching_cubes_sphere(make_ball):
    mesh = marching_cubes(make_ball(radius=6.0, dims=16))
    collapsed = collapse_short_edges(mesh, min_len=0.7)
    assert collapsed.vertex_count < mesh.vertex_count
    report = validate(collapsed)
    assert report.is_valid_surface
    assert report.euler_characteristic == 2
    assert collapsed.signed_volume() == pytest.approx(mesh.signed_volume(), rel=0.05)


def test_split_bisects_only_the_long_edge(tetrahedron):
    split = split_long_edges(tetrahedron, max_len=1.0)
    assert split.face_count == 6
    assert split.vertex_count == 5
    assert split.vertices[4] == pytest.approx((0.0, 0.0, 0.0))
    assert split.surface_area() == pytest.approx(tetrahedron.surface_area())
    assert split.signed_volume() == pytest.approx(tetrahedron.signed_volume())
    assert validate(split).is_valid_surface


def test_split_until_all_edges_are_short(make_icosphere):
    mesh = make_icosphere(2, radius=5.0)
    split = split_long_edges(mesh, max_len=0.5)
    assert split.edge_lengths().max() <= 0.5
    report = validate(split)
    assert report.is_valid_surface
    assert report.euler_characteristic == 2
    # midpoints stay on the existing faces
    assert split.surface_area() == pytest.approx(mesh.surface_area(), rel=1e-9)
    assert split.signed_volume() == pytest.approx(mesh.signed_volume(), rel=1e-9)
