# morphomics/transformers/model_io.py
"""
Model JSON

{version, base_score, learning_rate, feature_names, config,
 trees: [{nodes: [{feature, threshold, left, right, ...} | {leaf, cover}]}]}

Floats are written in shortest round-trip form, so a reloaded model gives
bitwise-equal predictions.
"""

import json
import logging
from pathlib import Path
from typing import List, Union

import pandas as pd
from pydantic import ValidationError

from morphomics.entities.gbt import MODEL_FORMAT_VERSION, FeatureImportance, GbtModel
from morphomics.exceptions import ModelFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def model_to_json(model: GbtModel) -> str:
    return model.model_dump_json(indent=2, exclude_none=True)


def save_model(model: GbtModel, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model_to_json(model) + '\n', encoding='utf-8')
    return path


def load_model(path: PathLike) -> GbtModel:
    """
    Read a model file

    Raises:
        ModelFormatError: unreadable, malformed or written by another format version
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding='utf-8'))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ModelFormatError(f"cannot read model {path}: {str(e)}") from e

    if not isinstance(payload, dict):
        raise ModelFormatError(f"model {path} is not a JSON object")
    version = payload.get('version')
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"model {path} has format version {version!r}, expected {MODEL_FORMAT_VERSION}")
    try:
        return GbtModel.model_validate(payload)
    except ValidationError as e:
        raise ModelFormatError(f"malformed model {path}: {str(e)}") from e


def write_config(model: GbtModel, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model.config.model_dump_json(indent=2) + '\n', encoding='utf-8')
    return path


def write_importance(importance: FeatureImportance, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows: List[dict] = [entry.model_dump() for entry in importance.entries]
    pd.DataFrame(rows, columns=['feature', 'gain', 'split_count']).to_csv(path, index=False, encoding='utf-8')
    return path
