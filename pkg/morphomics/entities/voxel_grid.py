# morphomics/entities/voxel_grid.py

from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

Triple = Tuple[float, float, float]


class VoxelGrid(BaseModel):
    """
    Binary occupancy volume with physical geometry

    `data` is indexed [x, y, z]; serialized layouts are x-fastest, which is
    numpy's Fortran order for this indexing. `origin` is the world position
    (mm) of the centre of voxel (0, 0, 0).
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dims: Tuple[int, int, int]
    spacing: Triple
    origin: Triple = (0.0, 0.0, 0.0)
    data: np.ndarray

    @field_validator('dims')
    @classmethod
    def check_dims(cls, value):
        if any(d < 1 for d in value):
            raise ValueError(f"dims must be positive, got {value}")
        return tuple(int(d) for d in value)

    @field_validator('spacing')
    @classmethod
    def check_spacing(cls, value):
        if any(not np.isfinite(s) or s <= 0 for s in value):
            raise ValueError(f"spacing components must be > 0, got {value}")
        return tuple(float(s) for s in value)

    @field_validator('origin')
    @classmethod
    def check_origin(cls, value):
        return tuple(float(o) for o in value)

    @field_validator('data', mode='before')
    @classmethod
    def coerce_data(cls, value):
        # tolerates 0/255 masks
        return np.asarray(value) > 0

    @model_validator(mode='after')
    def check_shape(self):
        if self.data.ndim != 3 or tuple(self.data.shape) != self.dims:
            raise ValueError(f"data shape {self.data.shape} does not match dims {self.dims}")
        return self

    @classmethod
    def from_array(cls, data, spacing=(1.0, 1.0, 1.0), origin=(0.0, 0.0, 0.0)) -> "VoxelGrid":
        data = np.asarray(data)
        return cls(dims=data.shape, spacing=spacing, origin=origin, data=data)

    @property
    def occupied_count(self) -> int:
        return int(np.count_nonzero(self.data))

    @property
    def voxel_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def is_empty(self) -> bool:
        return not self.data.any()

    def linear_data(self) -> np.ndarray:
        """Occupancy as uint8, x-fastest"""
        return self.data.astype(np.uint8).ravel(order='F')

    def same_as(self, other: "VoxelGrid") -> bool:
        return (
            self.dims == other.dims
            and self.spacing == other.spacing
            and self.origin == other.origin
            and np.array_equal(self.data, other.data)
        )
