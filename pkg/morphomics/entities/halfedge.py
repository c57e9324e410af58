# morphomics/entities/halfedge.py
"""
Array-based halfedge adjacency for triangle meshes

Halfedge 3*f + k runs from corner k to corner (k + 1) % 3 of face f, so
`next` and `face` are implicit in the index. Twins are matched by sorting
directed edge keys; a halfedge without a twin lies on the boundary.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from morphomics.entities.triangle_mesh import TriangleMesh

NO_TWIN = -1


class HalfedgeAdjacency(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    origin: np.ndarray
    destination: np.ndarray
    twin: np.ndarray
    next: np.ndarray
    face: np.ndarray
    vertex_out: np.ndarray
    duplicated: np.ndarray

    @classmethod
    def from_mesh(cls, mesh: TriangleMesh) -> "HalfedgeAdjacency":
        faces = mesh.triangles
        n_vertices = mesh.vertex_count
        n_halfedges = 3 * len(faces)

        origin = faces.reshape(-1)
        destination = faces[:, [1, 2, 0]].reshape(-1)
        index = np.arange(n_halfedges)
        nxt = 3 * (index // 3) + (index + 1) % 3
        face = index // 3

        key = origin * n_vertices + destination
        reverse_key = destination * n_vertices + origin
        order = np.argsort(key, kind='stable')
        sorted_key = key[order]

        # a directed edge used twice means inconsistent orientation or a non-manifold edge
        repeats = np.zeros(n_halfedges, dtype=bool)
        if n_halfedges:
            same = sorted_key[1:] == sorted_key[:-1]
            repeats[order[1:][same]] = True
            repeats[order[:-1][same]] = True

        twin = np.full(n_halfedges, NO_TWIN, dtype=np.int64)
        if n_halfedges:
            pos = np.searchsorted(sorted_key, reverse_key)
            pos = np.minimum(pos, n_halfedges - 1)
            found = sorted_key[pos] == reverse_key
            twin[found] = order[pos[found]]

        vertex_out = np.full(n_vertices, NO_TWIN, dtype=np.int64)
        # reversed so the lowest halfedge index wins
        vertex_out[origin[::-1]] = index[::-1]

        return cls(
            origin=origin,
            destination=destination,
            twin=twin,
            next=nxt,
            face=face,
            vertex_out=vertex_out,
            duplicated=repeats,
        )

    @property
    def halfedge_count(self) -> int:
        return len(self.origin)

    def boundary_halfedges(self) -> np.ndarray:
        return np.flatnonzero(self.twin == NO_TWIN)

    def is_closed(self) -> bool:
        return bool(np.all(self.twin != NO_TWIN))

    def is_consistent(self) -> bool:
        """twin(twin(h)) == h and next^3(h) == h wherever twins exist"""
        has_twin = self.twin != NO_TWIN
        twin_ok = np.all(self.twin[self.twin[has_twin]] == np.flatnonzero(has_twin))
        next_ok = np.all(self.next[self.next[self.next]] == np.arange(self.halfedge_count))
        return bool(twin_ok and next_ok)

    def rotation(self) -> np.ndarray:
        """Next outgoing halfedge around the same origin vertex (closed meshes only)"""
        previous = self.next[self.next]
        return self.twin[previous]

    def fan_count(self) -> int:
        """Number of vertex fans; equals the used-vertex count on a vertex-manifold closed mesh"""
        rot = self.rotation()
        n = self.halfedge_count
        graph = coo_matrix((np.ones(n), (np.arange(n), rot)), shape=(n, n))
        count, _ = connected_components(graph, directed=True, connection='weak')
        return int(count)
