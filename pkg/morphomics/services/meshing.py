# morphomics/services/meshing.py
"""
Surface reconstruction from binary patches

Marching cubes (Lewiner variant) on the occupancy field, mesh cleaning,
topological validation and the clean -> collapse -> split -> clean
simplification schedule.
"""

import logging

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree
from skimage import measure

from morphomics.entities.halfedge import HalfedgeAdjacency
from morphomics.entities.triangle_mesh import TriangleMesh, ValidationReport
from morphomics.entities.voxel_grid import VoxelGrid
from morphomics.exceptions import NoSurfaceError, NonManifoldError
from morphomics.services.remeshing import collapse_short_edges, split_long_edges

logger = logging.getLogger(__name__)

DEFAULT_MERGE_EPS = 1e-6
DEFAULT_AREA_EPS = 1e-9


def marching_cubes(grid: VoxelGrid, iso: float = 0.5) -> TriangleMesh:
    """
    Extract the iso-surface of the occupancy field

    The field is 0/1 at voxel centres and padded with a one-voxel zero border
    so every surface closes. Vertices are in world mm; faces point outward
    (toward values below `iso`).

    Raises:
        NoSurfaceError: no occupied voxel
    """
    if grid.is_empty:
        raise NoSurfaceError("no surface")

    field = np.pad(grid.data.astype(np.float32), 1, mode='constant', constant_values=0.0)
    spacing = np.asarray(grid.spacing)
    vertices, faces, _, _ = measure.marching_cubes(
        field,
        level=iso,
        spacing=tuple(spacing),
        method='lewiner',
        allow_degenerate=False,
    )
    if len(faces) == 0:
        raise NoSurfaceError("no surface")

    # undo the padding offset, then move to world coordinates
    vertices = vertices.astype(np.float64) - spacing + np.asarray(grid.origin)
    mesh = TriangleMesh(vertices=vertices, triangles=faces)
    if mesh.signed_volume() < 0:
        mesh = mesh.flipped()

    logger.debug(f"Marching cubes: {mesh.vertex_count} vertices, {mesh.face_count} faces")
    return mesh


def _component_count(mesh: TriangleMesh) -> int:
    used = np.unique(mesh.triangles)
    if used.size == 0:
        return 0
    edges = mesh.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
    n = mesh.vertex_count
    graph = coo_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    return int(np.unique(labels[used]).size)


def validate(mesh: TriangleMesh) -> ValidationReport:
    """
    Check closedness, edge/vertex manifoldness and orientation

    Failures are reported, never raised.
    """
    adjacency = HalfedgeAdjacency.from_mesh(mesh)
    edges = np.sort(np.stack([adjacency.origin, adjacency.destination], axis=1), axis=1)
    if len(edges):
        _, edge_use = np.unique(edges, axis=0, return_counts=True)
    else:
        edge_use = np.zeros(0, dtype=np.int64)

    oriented = not adjacency.duplicated.any()
    closed = bool(len(edge_use) and np.all(edge_use == 2))
    manifold = bool(np.all(edge_use <= 2))
    if closed and oriented and manifold:
        # a vertex whose faces form several fans is pinched
        used_vertices = np.unique(mesh.triangles).size
        manifold = adjacency.fan_count() == used_vertices

    vertex_count = mesh.vertex_count
    edge_count = len(edge_use)
    face_count = mesh.face_count
    return ValidationReport(
        closed=closed,
        manifold=manifold,
        oriented=oriented,
        euler_characteristic=vertex_count - edge_count + face_count,
        component_count=_component_count(mesh),
        vertex_count=vertex_count,
        edge_count=edge_count,
        face_count=face_count,
    )


def _merge_close_vertices(mesh: TriangleMesh, merge_eps: float) -> np.ndarray:
    """Representative index (smallest in its cluster) per vertex"""
    n = mesh.vertex_count
    if merge_eps <= 0 or n < 2:
        # exact duplicates only
        _, first, inverse = np.unique(mesh.vertices, axis=0, return_index=True, return_inverse=True)
        return first[inverse.reshape(-1)]

    pairs = cKDTree(mesh.vertices).query_pairs(merge_eps, output_type='ndarray')
    if len(pairs) == 0:
        return np.arange(n)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    representative = np.full(labels.max() + 1, n, dtype=np.int64)
    np.minimum.at(representative, labels, np.arange(n))
    return representative[labels]


def clean_mesh(mesh: TriangleMesh, merge_eps: float = DEFAULT_MERGE_EPS,
               area_eps: float = DEFAULT_AREA_EPS) -> TriangleMesh:
    """
    Merge near-duplicate vertices, drop duplicate and zero-area faces

    Raises:
        NonManifoldError: the cleaned mesh is not closed, oriented and manifold
    """
    if mesh.face_count == 0:
        raise NonManifoldError("cannot clean a mesh without triangles")

    representative = _merge_close_vertices(mesh, merge_eps)
    faces = representative[mesh.triangles]

    # combinatorially degenerate faces, then geometrically flat ones
    distinct = (faces[:, 0] != faces[:, 1]) & (faces[:, 1] != faces[:, 2]) & (faces[:, 2] != faces[:, 0])
    faces = faces[distinct]
    areas = TriangleMesh(vertices=mesh.vertices, triangles=faces).face_areas()
    faces = faces[areas >= area_eps]

    # same vertex set counts as the same face; keep the first occurrence
    _, first = np.unique(np.sort(faces, axis=1), axis=0, return_index=True)
    faces = faces[np.sort(first)]

    dropped = mesh.face_count - len(faces)
    cleaned = TriangleMesh(vertices=mesh.vertices, triangles=faces).compacted()
    if dropped or cleaned.vertex_count != mesh.vertex_count:
        logger.debug(
            f"Clean: vertices {mesh.vertex_count} -> {cleaned.vertex_count}, "
            f"faces {mesh.face_count} -> {cleaned.face_count}"
        )

    report = validate(cleaned)
    if not report.is_valid_surface:
        raise NonManifoldError(
            f"non-manifold after clean (closed={report.closed}, manifold={report.manifold}, "
            f"oriented={report.oriented})"
        )
    return cleaned


def simplify(mesh: TriangleMesh, min_len: float, max_len: float,
             merge_eps: float = DEFAULT_MERGE_EPS, area_eps: float = DEFAULT_AREA_EPS,
             rounds: int = 3) -> TriangleMesh:
    """Run clean -> collapse -> split -> clean until a fixpoint or `rounds` passes"""
    current = clean_mesh(mesh, merge_eps, area_eps)
    for round_index in range(rounds):
        updated = collapse_short_edges(current, min_len, area_eps=area_eps)
        updated = split_long_edges(updated, max_len)
        updated = clean_mesh(updated, merge_eps, area_eps)
        logger.debug(
            f"Simplify round {round_index + 1}: {current.vertex_count} -> {updated.vertex_count} vertices"
        )
        if updated.same_as(current):
            break
        current = updated
    return current
