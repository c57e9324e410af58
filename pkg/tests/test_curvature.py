# tests/test_curvature.py

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from morphomics.entities import HalfedgeAdjacency, ShapeSpec, TriangleMesh
from morphomics.exceptions import BoundaryEdgeError, DegenerateMeshError
from morphomics.services.curvature import (
    compute_curvature,
    gaussian_curvature,
    mesh_energy,
    mixed_voronoi_area,
    signed_dihedral_angles,
)
from morphomics.services.meshing import marching_cubes
from morphomics.services.synthkit import rasterize


def test_cube_total_mean_curvature(unit_cube):
    field = compute_curvature(unit_cube)
    # twelve right-angle edges of unit length, diagonals are flat
    assert field.total_mean_curvature() == pytest.approx(3.0 * np.pi)
    assert np.all(field.mean >= -1e-12)


def test_cube_corner_defects(unit_cube):
    field = compute_curvature(unit_cube)
    assert field.angle_defect == pytest.approx(np.full(8, 0.5 * np.pi))
    assert field.total_angle_defect() == pytest.approx(4.0 * np.pi)


def test_face_centre_vertices_are_flat(centred_cube):
    field = compute_curvature(centred_cube)
    assert field.mean[8:] == pytest.approx(np.zeros(6), abs=1e-12)
    assert field.angle_defect[8:] == pytest.approx(np.zeros(6), abs=1e-12)
    assert field.total_mean_curvature() == pytest.approx(3.0 * np.pi)


def test_dihedral_signs_on_cube(unit_cube):
    adjacency = HalfedgeAdjacency.from_mesh(unit_cube)
    theta = signed_dihedral_angles(unit_cube, adjacency)
    # twin halfedges carry the same angle
    assert theta == pytest.approx(theta[adjacency.twin])
    assert set(np.round(theta / (0.5 * np.pi), 9)) == {0.0, 1.0}


def test_rotation_walks_each_vertex_one_ring(unit_cube):
    adjacency = HalfedgeAdjacency.from_mesh(unit_cube)
    rot = adjacency.rotation()
    assert np.array_equal(adjacency.origin[rot], adjacency.origin)

    valence = np.bincount(adjacency.origin)
    for v, start in enumerate(adjacency.vertex_out):
        steps, h = 1, rot[start]
        while h != start:
            steps, h = steps + 1, rot[h]
        assert steps == valence[v]
    assert adjacency.fan_count() == 8


def test_vertex_sum_matches_edge_sum(make_icosphere):
    mesh = make_icosphere(2, radius=3.0)
    adjacency = HalfedgeAdjacency.from_mesh(mesh)
    theta = signed_dihedral_angles(mesh, adjacency)
    lengths = np.linalg.norm(mesh.vertices[adjacency.destination] - mesh.vertices[adjacency.origin], axis=1)
    primary = adjacency.origin < adjacency.destination
    field = compute_curvature(mesh)
    assert field.total_mean_curvature() == pytest.approx(0.5 * np.sum(theta[primary] * lengths[primary]))


@pytest.mark.parametrize('factor', [0.5, 2.0, 10.0])
def test_scaling(make_icosphere, factor):
    mesh = make_icosphere(2)
    base = compute_curvature(mesh)
    scaled = compute_curvature(mesh.scaled(factor))
    assert scaled.mean == pytest.approx(factor * base.mean, rel=1e-9)
    assert scaled.angle_defect == pytest.approx(base.angle_defect, abs=1e-9)
    assert mesh_energy(scaled) == pytest.approx(factor * mesh_energy(base), rel=1e-9)


def test_rigid_motion_invariance(make_icosphere):
    mesh = make_icosphere(2)
    vertices = np.array(mesh.vertices)
    vertices[5] *= 1.2
    bumpy = TriangleMesh(vertices=vertices, triangles=mesh.triangles)
    rotation = Rotation.from_euler('xyz', [0.3, -1.1, 2.0]).as_matrix()
    moved = bumpy.transformed(rotation, translation=(4.0, -7.5, 12.0))

    before = compute_curvature(bumpy)
    after = compute_curvature(moved)
    assert after.mean == pytest.approx(before.mean, abs=1e-9)
    assert after.angle_defect == pytest.approx(before.angle_defect, abs=1e-9)


def test_icosphere_is_convex_and_satisfies_gauss_bonnet(make_icosphere):
    field = compute_curvature(make_icosphere(3, radius=4.0))
    assert np.all(field.mean > 0)
    assert np.all(field.angle_defect > 0)
    assert field.total_angle_defect() == pytest.approx(4.0 * np.pi, abs=1e-9)
    assert field.total_mean_curvature() == pytest.approx(4.0 * np.pi * 4.0, rel=0.02)


def test_dent_gives_negative_mean_curvature(make_icosphere):
    mesh = make_icosphere(3)
    vertices = np.array(mesh.vertices)
    vertices[0] *= 0.7
    dented = TriangleMesh(vertices=vertices, triangles=mesh.triangles)
    field = compute_curvature(dented)
    assert field.mean[0] < 0
    assert field.angle_defect.min() < 0
    assert field.total_angle_defect() == pytest.approx(4.0 * np.pi, abs=1e-9)


def test_open_mesh_raises_boundary_error(unit_cube):
    holed = TriangleMesh(vertices=unit_cube.vertices, triangles=unit_cube.triangles[1:])
    with pytest.raises(BoundaryEdgeError):
        compute_curvature(holed)


def test_zero_area_triangle_raises():
    vertices = [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (2.0, 0.0, 0.0), (0.0, 1.0, 0.0)]
    mesh = TriangleMesh(vertices=vertices, triangles=[(0, 1, 2), (0, 3, 1), (1, 3, 2), (0, 2, 3)])
    with pytest.raises(DegenerateMeshError):
        gaussian_curvature(mesh)


def test_energy_is_sum_of_absolute_mean(unit_cube, make_icosphere):
    field = compute_curvature(unit_cube)
    assert mesh_energy(field, unit_cube) == pytest.approx(3.0 * np.pi)
    with pytest.raises(ValueError):
        mesh_energy(field, make_icosphere(1))


def test_marching_cubes_sphere_total(sphere_grid):
    mesh = marching_cubes(sphere_grid)
    field = compute_curvature(mesh)
    expected = 4.0 * np.pi * 10.0
    assert field.total_mean_curvature() == pytest.approx(expected, rel=0.12)
    assert field.total_angle_defect() == pytest.approx(4.0 * np.pi, abs=1e-6)


def test_sphere_total_error_shrinks_with_spacing():
    errors = []
    for spacing, side in ((1.25, 24), (0.625, 40), (0.3125, 72)):
        grid = rasterize(ShapeSpec(kind='sphere', radius_mm=10.0), spacing=(spacing,) * 3, dims=(side,) * 3)
        total = compute_curvature(marching_cubes(grid)).total_mean_curvature()
        errors.append((total - 40.0 * np.pi) / (40.0 * np.pi))
    assert all(0.0 < e < 0.12 for e in errors)
    assert errors[0] > errors[1] > errors[2]


def test_voronoi_areas_partition_the_surface(make_icosphere, tetrahedron):
    for mesh in (make_icosphere(2, radius=2.5), tetrahedron):
        assert mixed_voronoi_area(mesh).sum() == pytest.approx(mesh.surface_area(), rel=1e-9)


def test_area_normalized_mean_on_unit_sphere(make_icosphere):
    field = compute_curvature(make_icosphere(3), normalize_by_area=True)
    assert field.normalized
    assert field.vertex_area is not None
    assert field.mean == pytest.approx(np.ones(field.vertex_count), rel=0.08)
