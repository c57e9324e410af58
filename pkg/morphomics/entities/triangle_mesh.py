# morphomics/entities/triangle_mesh.py

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class TriangleMesh(BaseModel):
    """
    Indexed triangle surface in world millimetres

    Triangles are counter-clockwise seen from outside. Meshes are value
    objects: operations return new meshes and never write into these arrays.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    vertices: np.ndarray
    triangles: np.ndarray

    @field_validator('vertices', mode='before')
    @classmethod
    def coerce_vertices(cls, value):
        value = np.array(value, dtype=np.float64).reshape(-1, 3)
        value.setflags(write=False)
        return value

    @field_validator('triangles', mode='before')
    @classmethod
    def coerce_triangles(cls, value):
        value = np.array(value, dtype=np.int64).reshape(-1, 3)
        value.setflags(write=False)
        return value

    @model_validator(mode='after')
    def check_indices(self):
        if self.triangles.size and (
            self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices)
        ):
            raise ValueError("triangle references a vertex index out of range")
        return self

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def face_count(self) -> int:
        return len(self.triangles)

    def corners(self):
        """Per-face corner positions, each (F, 3)"""
        tri = self.vertices[self.triangles]
        return tri[:, 0], tri[:, 1], tri[:, 2]

    def face_normals(self) -> np.ndarray:
        """Un-normalized normals; their length is twice the face area"""
        p0, p1, p2 = self.corners()
        return np.cross(p1 - p0, p2 - p0)

    def face_areas(self) -> np.ndarray:
        return 0.5 * np.linalg.norm(self.face_normals(), axis=1)

    def surface_area(self) -> float:
        return float(self.face_areas().sum())

    def signed_volume(self) -> float:
        """Sum of det(v0, v1, v2) / 6; positive for outward orientation"""
        p0, p1, p2 = self.corners()
        return float(np.einsum('ij,ij->i', p0, np.cross(p1, p2)).sum() / 6.0)

    def unique_edges(self) -> np.ndarray:
        """Undirected edges as sorted (i, j) pairs, (E, 2)"""
        directed = self.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
        return np.unique(np.sort(directed, axis=1), axis=0)

    def edge_lengths(self) -> np.ndarray:
        edges = self.unique_edges()
        return np.linalg.norm(self.vertices[edges[:, 1]] - self.vertices[edges[:, 0]], axis=1)

    def scaled(self, factor: float) -> "TriangleMesh":
        return TriangleMesh(vertices=self.vertices * factor, triangles=self.triangles)

    def transformed(self, rotation: np.ndarray, translation=(0.0, 0.0, 0.0)) -> "TriangleMesh":
        return TriangleMesh(
            vertices=self.vertices @ np.asarray(rotation).T + np.asarray(translation),
            triangles=self.triangles,
        )

    def compacted(self) -> "TriangleMesh":
        """Drop unreferenced vertices, keeping the relative order of the rest"""
        used = np.unique(self.triangles)
        if len(used) == self.vertex_count:
            return self
        remap = np.full(self.vertex_count, -1, dtype=np.int64)
        remap[used] = np.arange(len(used))
        return TriangleMesh(vertices=self.vertices[used], triangles=remap[self.triangles])

    def flipped(self) -> "TriangleMesh":
        return TriangleMesh(vertices=self.vertices, triangles=self.triangles[:, ::-1])

    def same_as(self, other: "TriangleMesh") -> bool:
        return (
            self.vertices.shape == other.vertices.shape
            and self.triangles.shape == other.triangles.shape
            and np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.triangles, other.triangles)
        )


class ValidationReport(BaseModel):
    closed: bool
    manifold: bool
    oriented: bool
    euler_characteristic: int
    component_count: int
    vertex_count: int
    edge_count: int
    face_count: int

    @property
    def is_valid_surface(self) -> bool:
        return self.closed and self.manifold and self.oriented

    @property
    def genus(self) -> float:
        """Total genus assuming every component is closed and orientable"""
        return self.component_count - self.euler_characteristic / 2
