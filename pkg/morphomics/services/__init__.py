# morphomics/services/__init__.py
"""
Pipeline stages, classifier and evaluation
"""

from .volume import barycenter, extract_patch, resample_nearest
from .meshing import clean_mesh, marching_cubes, simplify, validate
from .remeshing import collapse_short_edges, split_long_edges
from .curvature import compute_curvature, gaussian_curvature, mean_curvature, mesh_energy
from .features import curvature_histogram, extract_morphomics, run_pipeline
from .classifier import feature_importance, predict_proba, predict_proba_batch, staged_log_loss, train
from .tuning import FixedCandidates, RandomSearchSampler, stratified_split, tune
from .evaluation import (
    bootstrap_auc,
    evaluate,
    feature_class_statistics,
    roc_auc,
    roc_points,
    welch_test,
    youden_point,
)
from .synthkit import make_corpus, rasterize, write_corpus

__all__ = [
    'barycenter',
    'extract_patch',
    'resample_nearest',
    'clean_mesh',
    'marching_cubes',
    'simplify',
    'validate',
    'collapse_short_edges',
    'split_long_edges',
    'compute_curvature',
    'gaussian_curvature',
    'mean_curvature',
    'mesh_energy',
    'curvature_histogram',
    'extract_morphomics',
    'run_pipeline',
    'feature_importance',
    'predict_proba',
    'predict_proba_batch',
    'staged_log_loss',
    'train',
    'FixedCandidates',
    'RandomSearchSampler',
    'stratified_split',
    'tune',
    'bootstrap_auc',
    'evaluate',
    'feature_class_statistics',
    'roc_auc',
    'roc_points',
    'welch_test',
    'youden_point',
    'make_corpus',
    'rasterize',
    'write_corpus',
]
