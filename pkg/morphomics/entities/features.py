# morphomics/entities/features.py

from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from morphomics.entities.curvature_field import CurvatureField
from morphomics.entities.triangle_mesh import TriangleMesh

ENERGY_NAME = 'energy'


def bin_names(bin_count: int) -> List[str]:
    return [f"bin_{i}" for i in range(bin_count)]


def feature_names(bin_count: int) -> List[str]:
    return bin_names(bin_count) + [ENERGY_NAME]


class HistogramSpec(BaseModel):
    """Fixed-window histogram of per-vertex curvature"""
    model_config = ConfigDict(frozen=True)

    bin_count: int = Field(default=10, ge=1)
    lo: float = -0.2
    hi: float = 0.2
    clamp_out_of_range: bool = True

    @field_validator('hi')
    @classmethod
    def check_window(cls, value, info):
        lo = info.data.get('lo')
        if lo is not None and not lo < value:
            raise ValueError(f"histogram window needs lo < hi, got [{lo}, {value}]")
        return value

    @property
    def bin_width(self) -> float:
        return (self.hi - self.lo) / self.bin_count


class FeatureVector(BaseModel):
    """Curvature histogram mass per bin plus total mesh energy"""
    model_config = ConfigDict(frozen=True)

    bins: Tuple[float, ...]
    energy: float = Field(ge=0)

    @field_validator('bins')
    @classmethod
    def check_bins(cls, value):
        if not value:
            raise ValueError("feature vector needs at least one bin")
        if any(b < 0 or b > 1 for b in value):
            raise ValueError("bin mass must lie in [0, 1]")
        if abs(sum(value) - 1.0) > 1e-12:
            raise ValueError(f"bin mass sums to {sum(value)!r}, expected 1")
        return tuple(float(b) for b in value)

    @property
    def names(self) -> List[str]:
        return feature_names(len(self.bins))

    def values(self) -> np.ndarray:
        return np.array(list(self.bins) + [self.energy], dtype=np.float64)

    def as_row(self, sample_id: str, label: Optional[int] = None) -> Dict[str, object]:
        row: Dict[str, object] = {'id': sample_id}
        row.update(zip(self.names, self.values().tolist()))
        if label is not None:
            row['label'] = int(label)
        return row


class MeshStats(BaseModel):
    """Diagnostics recorded next to each extracted feature vector"""
    vertex_count: int
    face_count: int
    euler_characteristic: int
    component_count: int
    total_mean_curvature: float
    total_absolute_defect: float


class MorphomicsResult(BaseModel):
    """Everything one pipeline run produced for a single mask"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    features: FeatureVector
    stats: MeshStats
    mesh: TriangleMesh
    curvature: CurvatureField

    @model_validator(mode='after')
    def check_payload(self):
        if self.mesh.vertex_count != self.curvature.vertex_count:
            raise ValueError("curvature field does not belong to the mesh")
        return self


class FeatureTable(BaseModel):
    """Rows of a feature CSV split into ids, a value matrix and optional labels"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    ids: List[str]
    names: List[str]
    values: np.ndarray
    labels: Optional[np.ndarray] = None

    @model_validator(mode='after')
    def check_shapes(self):
        if self.values.shape != (len(self.ids), len(self.names)):
            raise ValueError(
                f"values shape {self.values.shape} does not match {len(self.ids)} ids x {len(self.names)} names"
            )
        if self.labels is not None and len(self.labels) != len(self.ids):
            raise ValueError("labels length differs from row count")
        return self

    @property
    def row_count(self) -> int:
        return len(self.ids)

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    def take(self, rows) -> "FeatureTable":
        rows = np.asarray(rows, dtype=np.int64)
        return FeatureTable(
            ids=[self.ids[i] for i in rows],
            names=self.names,
            values=self.values[rows],
            labels=None if self.labels is None else self.labels[rows],
        )
