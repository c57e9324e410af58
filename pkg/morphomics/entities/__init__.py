# morphomics/entities/__init__.py
"""
Domain entities
"""

from .voxel_grid import VoxelGrid
from .triangle_mesh import TriangleMesh, ValidationReport
from .halfedge import HalfedgeAdjacency
from .curvature_field import CurvatureField
from .features import FeatureTable, FeatureVector, HistogramSpec, MeshStats, MorphomicsResult, feature_names
from .gbt import FeatureImportance, GbtConfig, GbtModel, RegressionTree, SearchSpace, TreeNode
from .evaluation import BootstrapSummary, EvalReport, RocPoint, WelchResult, YoudenPoint
from .shape import ShapeSpec

__all__ = [
    'VoxelGrid',
    'TriangleMesh',
    'ValidationReport',
    'HalfedgeAdjacency',
    'CurvatureField',
    'FeatureTable',
    'FeatureVector',
    'HistogramSpec',
    'MeshStats',
    'MorphomicsResult',
    'feature_names',
    'FeatureImportance',
    'GbtConfig',
    'GbtModel',
    'RegressionTree',
    'SearchSpace',
    'TreeNode',
    'BootstrapSummary',
    'EvalReport',
    'RocPoint',
    'WelchResult',
    'YoudenPoint',
    'ShapeSpec',
]
