"""
3D-morphomics toolkit

Binary lesion masks -> surface meshes -> curvature-distribution features ->
gradient boosted tree classifier and its evaluation statistics.
"""

__version__ = "1.0.0"
