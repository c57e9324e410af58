# morphomics/config.py
"""
Environment and pipeline configuration

Environment variables (a local .env file is honoured):
- MORPHOMICS_LOG: error | warning | info | debug
- MORPHOMICS_RUN_LOG_DIR: directory for per-run JSON logs
- MORPHOMICS_JOBS: default worker count for batch extraction
- MORPHOMICS_SEED: default seed for every command
"""

import os
import logging
from typing import Literal

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator

# Load environment variables for local development
load_dotenv()

MORPHOMICS_LOG = os.environ.get("MORPHOMICS_LOG", "info")
MORPHOMICS_RUN_LOG_DIR = os.environ.get("MORPHOMICS_RUN_LOG_DIR", "run_logs")
MORPHOMICS_JOBS = int(os.environ.get("MORPHOMICS_JOBS", "1"))
MORPHOMICS_SEED = int(os.environ.get("MORPHOMICS_SEED", "0"))

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"

LOG_LEVELS = {
    'error': logging.ERROR,
    'warning': logging.WARNING,
    'info': logging.INFO,
    'debug': logging.DEBUG,
}


def configure_logging(level: str = MORPHOMICS_LOG) -> None:
    """Configure the global logger once, using the MORPHOMICS_LOG vocabulary"""
    resolved = LOG_LEVELS.get(level.lower())
    if resolved is None:
        raise ValueError(f"Unknown log level {level!r}; expected one of {sorted(LOG_LEVELS)}")
    logging.basicConfig(level=resolved, format=LOG_FORMAT)
    logging.getLogger().setLevel(resolved)


class PipelineConfig(BaseModel):
    """Knobs of the mask -> features pipeline"""
    model_config = ConfigDict(frozen=True)

    spacing_mm: float = Field(default=0.625, gt=0)
    patch_side: int = Field(default=64, ge=1)
    iso: float = Field(default=0.5, gt=0, lt=1)
    min_edge_factor: float = Field(default=0.4, ge=0)
    max_edge_factor: float = Field(default=1.6, gt=0)
    merge_eps: float = Field(default=1e-6, ge=0)
    area_eps: float = Field(default=1e-9, ge=0)
    simplify_rounds: int = Field(default=3, ge=0)
    normalize_by_area: bool = False
    quantity: Literal['mean', 'gaussian'] = 'mean'

    @field_validator('max_edge_factor')
    @classmethod
    def check_split_above_collapse(cls, value, info):
        min_factor = info.data.get('min_edge_factor')
        # splitting at or below the collapse length would never reach a fixpoint
        if min_factor is not None and value <= 2 * min_factor:
            raise ValueError(
                f"max_edge_factor ({value}) must exceed twice min_edge_factor ({min_factor})"
            )
        return value

    @property
    def min_edge_mm(self) -> float:
        return self.min_edge_factor * self.spacing_mm

    @property
    def max_edge_mm(self) -> float:
        return self.max_edge_factor * self.spacing_mm
