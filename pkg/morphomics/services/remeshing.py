# morphomics/services/remeshing.py
"""
Edge-length driven remeshing on closed manifold meshes

- collapse_short_edges: midpoint collapses guarded by the link condition
  and a face-flip test; unsafe collapses are skipped.
- split_long_edges: longest-first midpoint bisection of the two faces
  sharing an edge.

Both keep orientation and closedness and return the input unchanged when
no edge qualifies.
"""

import heapq
import logging
from typing import Dict, List, Set, Tuple

import numpy as np

from morphomics.entities.triangle_mesh import TriangleMesh

logger = logging.getLogger(__name__)

MAX_COLLAPSE_PASSES = 10


class _CollapseState:
    """Mutable working copy with vertex -> incident faces sets"""

    def __init__(self, mesh: TriangleMesh):
        self.vertices = np.array(mesh.vertices, dtype=np.float64)
        self.faces = np.array(mesh.triangles, dtype=np.int64)
        self.face_alive = np.ones(len(self.faces), dtype=bool)
        self.vertex_faces: List[Set[int]] = [set() for _ in range(len(self.vertices))]
        for f, face in enumerate(self.faces):
            for v in face:
                self.vertex_faces[v].add(f)

    def ring(self, v: int) -> Set[int]:
        neighbours = set()
        for f in self.vertex_faces[v]:
            neighbours.update(int(u) for u in self.faces[f])
        neighbours.discard(v)
        return neighbours

    def short_edges(self, min_len: float) -> List[Tuple[int, int]]:
        faces = self.faces[self.face_alive]
        if len(faces) == 0:
            return []
        edges = np.unique(np.sort(faces[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1), axis=0)
        lengths = np.linalg.norm(self.vertices[edges[:, 1]] - self.vertices[edges[:, 0]], axis=1)
        short = lengths < min_len
        edges, lengths = edges[short], lengths[short]
        order = np.lexsort((edges[:, 1], edges[:, 0], lengths))
        return [(int(a), int(b)) for a, b in edges[order]]

    def _face_normal(self, face, positions) -> np.ndarray:
        p0, p1, p2 = (positions[v] for v in face)
        return np.cross(p1 - p0, p2 - p0)

    def can_collapse(self, a: int, b: int, shared: Set[int], area_eps: float) -> bool:
        opposite = set()
        for f in shared:
            opposite.update(int(u) for u in self.faces[f] if u != a and u != b)
        if len(opposite) != 2:
            return False

        # link condition
        if self.ring(a) & self.ring(b) != opposite:
            return False
        # opposite vertices would drop to valence 2
        if any(len(self.ring(c)) <= 3 for c in opposite):
            return False

        midpoint = 0.5 * (self.vertices[a] + self.vertices[b])
        for f in (self.vertex_faces[a] | self.vertex_faces[b]) - shared:
            face = self.faces[f]
            before = self._face_normal(face, self.vertices)
            moved = {int(v): (midpoint if v in (a, b) else self.vertices[v]) for v in face}
            after = self._face_normal(face, moved)
            if 0.5 * np.linalg.norm(after) < area_eps or np.dot(before, after) <= 0:
                return False
        return True

    def collapse(self, a: int, b: int, shared: Set[int]) -> None:
        self.vertices[a] = 0.5 * (self.vertices[a] + self.vertices[b])
        for f in shared:
            self.face_alive[f] = False
            for v in self.faces[f]:
                self.vertex_faces[v].discard(f)
        for f in self.vertex_faces[b]:
            self.faces[f][self.faces[f] == b] = a
            self.vertex_faces[a].add(f)
        self.vertex_faces[b] = set()

    def to_mesh(self) -> TriangleMesh:
        return TriangleMesh(vertices=self.vertices, triangles=self.faces[self.face_alive]).compacted()


def collapse_short_edges(mesh: TriangleMesh, min_len: float, area_eps: float = 1e-9) -> TriangleMesh:
    """
    Collapse edges shorter than `min_len` to their midpoint

    Edges whose collapse would break manifoldness or flip a face are left in
    place.
    """
    state = _CollapseState(mesh)
    total, skipped = 0, 0
    for _ in range(MAX_COLLAPSE_PASSES):
        collapsed, skipped = 0, 0
        for a, b in state.short_edges(min_len):
            shared = state.vertex_faces[a] & state.vertex_faces[b]
            if len(shared) != 2:
                continue
            if np.linalg.norm(state.vertices[a] - state.vertices[b]) >= min_len:
                continue
            if not state.can_collapse(a, b, shared, area_eps):
                skipped += 1
                continue
            state.collapse(a, b, shared)
            collapsed += 1
        total += collapsed
        if collapsed == 0:
            break

    if total == 0:
        if skipped:
            logger.debug(f"Collapse: {skipped} short edges left in place")
        return mesh
    if skipped:
        logger.debug(f"Collapse: {total} edges collapsed, {skipped} unsafe collapses skipped")
    return state.to_mesh()


def split_long_edges(mesh: TriangleMesh, max_len: float) -> TriangleMesh:
    """Bisect edges longer than `max_len`, longest first, until none remain"""
    vertices: List[np.ndarray] = [np.array(v) for v in mesh.vertices]
    faces: List[List[int]] = [[int(v) for v in face] for face in mesh.triangles]
    edge_face: Dict[Tuple[int, int], int] = {}
    for f, (a, b, c) in enumerate(faces):
        edge_face[(a, b)] = f
        edge_face[(b, c)] = f
        edge_face[(c, a)] = f

    def length(u: int, v: int) -> float:
        return float(np.linalg.norm(vertices[u] - vertices[v]))

    heap: List[Tuple[float, int, int]] = []

    def push(u: int, v: int) -> None:
        u, v = min(u, v), max(u, v)
        edge_length = length(u, v)
        if edge_length > max_len:
            heapq.heappush(heap, (-edge_length, u, v))

    for (u, v) in list(edge_face):
        if u < v:
            push(u, v)

    split_limit = 100 * max(len(faces), 1)
    splits = 0
    while heap and splits < split_limit:
        _, u, v = heapq.heappop(heap)
        if (u, v) not in edge_face or (v, u) not in edge_face:
            continue
        if length(u, v) <= max_len:
            continue

        a, b = u, v
        f1, f2 = edge_face.pop((a, b)), edge_face.pop((b, a))
        c = next(w for w in faces[f1] if w != a and w != b)
        d = next(w for w in faces[f2] if w != a and w != b)

        m = len(vertices)
        vertices.append(0.5 * (vertices[a] + vertices[b]))
        f3, f4 = len(faces), len(faces) + 1
        faces[f1] = [a, m, c]
        faces.append([m, b, c])
        faces[f2] = [b, m, d]
        faces.append([m, a, d])

        edge_face[(a, m)] = f1
        edge_face[(m, c)] = f1
        edge_face[(m, b)] = f3
        edge_face[(b, c)] = f3
        edge_face[(c, m)] = f3
        edge_face[(b, m)] = f2
        edge_face[(m, d)] = f2
        edge_face[(m, a)] = f4
        edge_face[(a, d)] = f4
        edge_face[(d, m)] = f4

        for w in (a, b, c, d):
            push(m, w)
        splits += 1

    if splits == 0:
        return mesh
    if heap and splits >= split_limit:
        logger.warning(f"Split: stopped after {splits} splits with long edges remaining")
    logger.debug(f"Split: {splits} edges bisected")
    return TriangleMesh(vertices=np.array(vertices), triangles=np.array(faces))
