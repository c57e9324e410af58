# morphomics/services/curvature.py
"""
Discrete curvature on closed triangle meshes

Integrated mean curvature per vertex is a quarter of the sum, over outgoing
halfedges, of signed dihedral angle times edge length. Gaussian curvature is
the angle defect. Both are integrated quantities; the optional area
normalization divides mean curvature by the mixed Voronoi area.
"""

import logging
from typing import Optional

import numpy as np

from morphomics.entities.curvature_field import CurvatureField
from morphomics.entities.halfedge import HalfedgeAdjacency
from morphomics.entities.triangle_mesh import TriangleMesh
from morphomics.exceptions import BoundaryEdgeError, DegenerateMeshError

logger = logging.getLogger(__name__)

DEGENERATE_AREA = 1e-12


def _unit(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    return np.divide(vectors, norms, out=np.zeros_like(vectors), where=norms > 0)


def signed_dihedral_angles(mesh: TriangleMesh, adjacency: HalfedgeAdjacency) -> np.ndarray:
    """
    Per-halfedge signed dihedral angle in (-pi, pi]

    Positive on convex edges under outward orientation, zero across coplanar
    faces. A halfedge and its twin carry the same angle.
    """
    if not adjacency.is_closed():
        count = len(adjacency.boundary_halfedges())
        raise BoundaryEdgeError(f"dihedral angle undefined on {count} boundary halfedges")

    normals = _unit(mesh.face_normals())
    n_face = normals[adjacency.face]
    n_twin = normals[adjacency.face[adjacency.twin]]
    direction = _unit(mesh.vertices[adjacency.destination] - mesh.vertices[adjacency.origin])

    sine = np.einsum('ij,ij->i', np.cross(n_face, n_twin), direction)
    cosine = np.einsum('ij,ij->i', n_face, n_twin)
    return np.arctan2(sine, cosine)


def mean_curvature(mesh: TriangleMesh, adjacency: Optional[HalfedgeAdjacency] = None) -> np.ndarray:
    """
    Integrated mean curvature per vertex (mm)

    Raises:
        BoundaryEdgeError: the mesh has an edge with one incident face
    """
    if adjacency is None:
        adjacency = HalfedgeAdjacency.from_mesh(mesh)
    theta = signed_dihedral_angles(mesh, adjacency)
    lengths = np.linalg.norm(
        mesh.vertices[adjacency.destination] - mesh.vertices[adjacency.origin], axis=1
    )
    contribution = 0.25 * theta * lengths
    mean = np.bincount(adjacency.origin, weights=contribution, minlength=mesh.vertex_count)

    # every undirected edge feeds both endpoints: sum K_i == 1/2 sum_e theta_e l_e
    primary = adjacency.origin < adjacency.destination
    edge_total = 0.5 * float(np.sum(theta[primary] * lengths[primary]))
    if not np.isclose(mean.sum(), edge_total, rtol=1e-9, atol=1e-9):
        logger.warning(f"Mean curvature vertex sum {mean.sum()} disagrees with edge sum {edge_total}")
    return mean


def corner_angles(mesh: TriangleMesh) -> np.ndarray:
    """Interior angle at each face corner, (F, 3)"""
    p0, p1, p2 = mesh.corners()
    angles = np.empty((mesh.face_count, 3))
    for k, (here, ahead, behind) in enumerate(((p0, p1, p2), (p1, p2, p0), (p2, p0, p1))):
        u = ahead - here
        v = behind - here
        angles[:, k] = np.arctan2(
            np.linalg.norm(np.cross(u, v), axis=1),
            np.einsum('ij,ij->i', u, v),
        )
    return angles


def gaussian_curvature(mesh: TriangleMesh) -> np.ndarray:
    """
    Angle defect per vertex: 2*pi minus the incident corner angles

    Raises:
        DegenerateMeshError: an incident triangle has zero area
    """
    areas = mesh.face_areas()
    degenerate = np.flatnonzero(areas <= DEGENERATE_AREA)
    if degenerate.size:
        raise DegenerateMeshError(f"{degenerate.size} zero-area triangles, first at face {degenerate[0]}")
    angles = corner_angles(mesh)
    angle_sum = np.bincount(mesh.triangles.reshape(-1), weights=angles.reshape(-1),
                            minlength=mesh.vertex_count)
    return 2.0 * np.pi - angle_sum


def mixed_voronoi_area(mesh: TriangleMesh) -> np.ndarray:
    """
    Mixed Voronoi area per vertex

    Voronoi share for non-obtuse triangles; for obtuse ones half the area goes
    to the obtuse corner and a quarter to each other corner.
    """
    angles = corner_angles(mesh)
    areas = mesh.face_areas()
    p0, p1, p2 = mesh.corners()
    # squared length of the edge opposite each corner
    opposite_sq = np.stack([
        np.sum((p2 - p1) ** 2, axis=1),
        np.sum((p0 - p2) ** 2, axis=1),
        np.sum((p1 - p0) ** 2, axis=1),
    ], axis=1)
    cot = 1.0 / np.tan(np.clip(angles, 1e-12, np.pi - 1e-12))

    share = np.empty_like(angles)
    for k in range(3):
        k1, k2 = (k + 1) % 3, (k + 2) % 3
        # edges at corner k are opposite corners k1 and k2
        share[:, k] = 0.125 * (opposite_sq[:, k1] * cot[:, k1] + opposite_sq[:, k2] * cot[:, k2])

    obtuse = angles > 0.5 * np.pi
    obtuse_face = obtuse.any(axis=1)
    share[obtuse_face] = np.where(obtuse[obtuse_face], 0.5, 0.25) * areas[obtuse_face, None]

    return np.bincount(mesh.triangles.reshape(-1), weights=share.reshape(-1),
                       minlength=mesh.vertex_count)


def compute_curvature(mesh: TriangleMesh, normalize_by_area: bool = False) -> CurvatureField:
    """Mean curvature and angle defect of a closed mesh"""
    adjacency = HalfedgeAdjacency.from_mesh(mesh)
    mean = mean_curvature(mesh, adjacency)
    defect = gaussian_curvature(mesh)
    if not normalize_by_area:
        return CurvatureField(mean=mean, angle_defect=defect)

    area = mixed_voronoi_area(mesh)
    mean = np.divide(mean, area, out=np.zeros_like(mean), where=area > 0)
    return CurvatureField(mean=mean, angle_defect=defect, vertex_area=area, normalized=True)


def mesh_energy(field: CurvatureField, mesh: Optional[TriangleMesh] = None) -> float:
    """Sum of absolute per-vertex mean curvature (mm)"""
    if mesh is not None and mesh.vertex_count != field.vertex_count:
        raise ValueError("curvature field does not belong to the mesh")
    return float(np.abs(field.mean).sum())
