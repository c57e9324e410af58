# morphomics/transformers/table_io.py
"""
Feature and label tables (CSV, UTF-8, '.' decimal separator)

Feature CSV header: id,<feature columns...>[,label]. Every column other
than id and label is a numeric feature, so externally joined tables load
unchanged.
"""

import logging
from pathlib import Path
from typing import Dict, Iterable, List, Union

import numpy as np
import pandas as pd

from morphomics.entities.features import FeatureTable
from morphomics.exceptions import FeatureMismatchError, TrainingDataError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

ID_COLUMN = 'id'
LABEL_COLUMN = 'label'
LABELS_HEADER = ['id', 'label', 'kind', 'seed']


def write_feature_rows(rows: List[Dict[str, object]], path: PathLike) -> Path:
    """Write rows as produced by FeatureVector.as_row, in the given order"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(rows)
    if LABEL_COLUMN in frame.columns:
        frame[LABEL_COLUMN] = frame[LABEL_COLUMN].astype(int)
    frame.to_csv(path, index=False, encoding='utf-8')
    return path


def write_feature_table(table: FeatureTable, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table_to_frame(table).to_csv(path, index=False, encoding='utf-8')
    return path


def table_to_frame(table: FeatureTable) -> pd.DataFrame:
    frame = pd.DataFrame(table.values, columns=table.names)
    frame.insert(0, ID_COLUMN, table.ids)
    if table.labels is not None:
        frame[LABEL_COLUMN] = table.labels.astype(int)
    return frame


def frame_to_table(frame: pd.DataFrame, require_label: bool = False) -> FeatureTable:
    """
    Validate a feature frame

    Raises:
        TrainingDataError: missing id/label column, non-numeric or non-finite
            features, or labels outside {0, 1}
    """
    if ID_COLUMN not in frame.columns:
        raise TrainingDataError(f"feature table has no {ID_COLUMN!r} column")
    if require_label and LABEL_COLUMN not in frame.columns:
        raise TrainingDataError(f"feature table has no {LABEL_COLUMN!r} column")

    names = [c for c in frame.columns if c not in (ID_COLUMN, LABEL_COLUMN)]
    if not names:
        raise TrainingDataError("feature table has no feature columns")
    try:
        values = frame[names].to_numpy(dtype=np.float64)
    except ValueError as e:
        raise TrainingDataError(f"feature table holds non-numeric values: {str(e)}") from e
    if not np.all(np.isfinite(values)):
        bad = sorted({names[j] for j in np.argwhere(~np.isfinite(values))[:, 1]})
        raise TrainingDataError(f"feature table holds non-finite values in {bad}")

    labels = None
    if LABEL_COLUMN in frame.columns:
        raw = frame[LABEL_COLUMN]
        if raw.isna().any() or not raw.isin([0, 1]).all():
            raise TrainingDataError("labels must be 0 or 1")
        labels = raw.to_numpy().astype(np.int64)

    return FeatureTable(ids=frame[ID_COLUMN].astype(str).tolist(), names=names, values=values, labels=labels)


def read_feature_table(path: PathLike, require_label: bool = False) -> FeatureTable:
    """Read and validate a feature CSV"""
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype={ID_COLUMN: str}, encoding='utf-8')
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise TrainingDataError(f"cannot read feature table {path}: {str(e)}") from e
    table = frame_to_table(frame, require_label=require_label)
    logger.debug(f"Loaded {table.row_count} rows x {len(table.names)} features from {path.name}")
    return table


def write_labels(rows: Iterable[Dict[str, object]], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(list(rows), columns=LABELS_HEADER).to_csv(path, index=False, encoding='utf-8')
    return path


def read_labels(path: PathLike) -> Dict[str, int]:
    """id -> label from a labels CSV (extra columns ignored)"""
    try:
        frame = pd.read_csv(path, dtype={ID_COLUMN: str}, encoding='utf-8')
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise TrainingDataError(f"cannot read labels {path}: {str(e)}") from e
    if ID_COLUMN not in frame.columns or LABEL_COLUMN not in frame.columns:
        raise TrainingDataError(f"labels file {path} needs 'id' and 'label' columns")
    if frame[LABEL_COLUMN].isna().any() or not frame[LABEL_COLUMN].isin([0, 1]).all():
        raise TrainingDataError(f"labels in {path} must be 0 or 1")
    return dict(zip(frame[ID_COLUMN], frame[LABEL_COLUMN].astype(int)))


def write_frame(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, encoding='utf-8')
    return path


def align_features(table: FeatureTable, names: List[str]) -> FeatureTable:
    """Reorder columns to `names`; raises FeatureMismatchError when the sets differ"""
    missing = [n for n in names if n not in table.names]
    extra = [n for n in table.names if n not in names]
    if missing or extra:
        raise FeatureMismatchError(f"feature columns differ from the model: missing {missing}, unexpected {extra}")
    order = [table.names.index(n) for n in names]
    return FeatureTable(ids=table.ids, names=list(names), values=table.values[:, order], labels=table.labels)
