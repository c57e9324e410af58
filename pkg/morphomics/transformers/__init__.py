# morphomics/transformers/__init__.py
"""
File codecs for masks, meshes, feature tables, models and reports
"""

from .mask_io import MASK_SUFFIXES, is_mask_file, load_mask, write_mask
from .mesh_io import read_off, write_curvature_csv, write_off, write_stl
from .model_io import load_model, save_model, write_config, write_importance
from .report_io import read_report, write_report, write_roc_csv
from .table_io import (
    align_features,
    read_feature_table,
    read_labels,
    write_feature_rows,
    write_feature_table,
    write_frame,
    write_labels,
)

__all__ = [
    'MASK_SUFFIXES',
    'is_mask_file',
    'load_mask',
    'write_mask',
    'read_off',
    'write_curvature_csv',
    'write_off',
    'write_stl',
    'load_model',
    'save_model',
    'write_config',
    'write_importance',
    'read_report',
    'write_report',
    'write_roc_csv',
    'align_features',
    'read_feature_table',
    'read_labels',
    'write_feature_rows',
    'write_feature_table',
    'write_frame',
    'write_labels',
]
