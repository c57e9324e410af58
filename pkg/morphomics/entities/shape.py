# morphomics/entities/shape.py

from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

ShapeKind = Literal['sphere', 'ellipsoid', 'spiky_sphere', 'lobulated']


class ShapeSpec(BaseModel):
    """
    Implicit star-shaped solid centred in its grid

    The surface radius along direction u is the ellipsoid radius (or
    `radius_mm`) plus seeded Gaussian bumps for spiky/lobulated kinds plus a
    smooth jitter of amplitude `jitter_mm`.
    """
    model_config = ConfigDict(frozen=True)

    kind: ShapeKind = 'sphere'
    radius_mm: float = Field(default=10.0, gt=0)
    semi_axes_mm: Optional[Tuple[float, float, float]] = None
    spike_count: int = Field(default=0, ge=0)
    spike_height_mm: float = Field(default=0.0, ge=0)
    spike_width_mm: float = Field(default=1.5, gt=0)
    jitter_mm: float = Field(default=0.0, ge=0)
    seed: int = 0

    @model_validator(mode='after')
    def check_axes(self):
        if self.kind == 'ellipsoid':
            if self.semi_axes_mm is None:
                raise ValueError("ellipsoid needs semi_axes_mm")
            if any(a <= 0 for a in self.semi_axes_mm):
                raise ValueError(f"semi axes must be > 0, got {self.semi_axes_mm}")
        return self

    @property
    def has_bumps(self) -> bool:
        return self.kind in ('spiky_sphere', 'lobulated') and self.spike_count > 0

    def base_axes(self) -> Tuple[float, float, float]:
        if self.kind == 'ellipsoid':
            return self.semi_axes_mm
        return (self.radius_mm,) * 3

    def max_extent_mm(self) -> float:
        """Upper bound of the surface radius over all directions"""
        bumps = self.spike_height_mm if self.has_bumps else 0.0
        return max(self.base_axes()) + bumps + self.jitter_mm
