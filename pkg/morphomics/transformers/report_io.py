"""
Evaluation report JSON and ROC CSV (threshold,fpr,tpr)

The first ROC threshold is +inf; JSON carries it as `Infinity`.
"""

import json
from pathlib import Path
from typing import List, Union

import pandas as pd
from pydantic import ValidationError

from morphomics.entities.evaluation import EvalReport, RocPoint
from morphomics.exceptions import MorphomicsError

PathLike = Union[str, Path]


def write_report(report: EvalReport, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report.model_dump(), indent=2) + '\n', encoding='utf-8')
    return path


def read_report(path: PathLike) -> EvalReport:
    path = Path(path)
    try:
        return EvalReport.model_validate(json.loads(path.read_text(encoding='utf-8')))
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise MorphomicsError(f"cannot read report {path}: {str(e)}") from e


def write_roc_csv(points: List[RocPoint], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([p.model_dump() for p in points], columns=['threshold', 'fpr', 'tpr'])
    frame.to_csv(path, index=False, encoding='utf-8')
    return path
