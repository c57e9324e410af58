# morphomics/entities/curvature_field.py

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class CurvatureField(BaseModel):
    """
    Per-vertex discrete curvatures of one mesh

    mean: integrated mean curvature (mm), a quarter of the dihedral-weighted
        edge lengths around the vertex.
    angle_defect: 2*pi minus the incident corner angles (radians).
    vertex_area: mixed Voronoi area (mm^2), only set by the area-normalized variant.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mean: np.ndarray
    angle_defect: np.ndarray
    vertex_area: Optional[np.ndarray] = None
    normalized: bool = False

    @field_validator('mean', 'angle_defect', 'vertex_area', mode='before')
    @classmethod
    def coerce(cls, value):
        if value is None:
            return None
        return np.asarray(value, dtype=np.float64).reshape(-1)

    @model_validator(mode='after')
    def check_lengths(self):
        if len(self.mean) != len(self.angle_defect):
            raise ValueError(
                f"mean ({len(self.mean)}) and angle_defect ({len(self.angle_defect)}) lengths differ"
            )
        if self.vertex_area is not None and len(self.vertex_area) != len(self.mean):
            raise ValueError("vertex_area length differs from vertex count")
        return self

    @property
    def vertex_count(self) -> int:
        return len(self.mean)

    def total_mean_curvature(self) -> float:
        return float(self.mean.sum())

    def total_angle_defect(self) -> float:
        return float(self.angle_defect.sum())

    def total_absolute_defect(self) -> float:
        return float(np.abs(self.angle_defect).sum())
