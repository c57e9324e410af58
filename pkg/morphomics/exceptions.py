# morphomics/exceptions.py
"""
Error taxonomy shared by every pipeline stage.

All errors derive from ValueError so callers that only guard against bad
inputs keep working.
"""


class MorphomicsError(ValueError):
    """Base class for pipeline errors"""


class MaskFormatError(MorphomicsError):
    """Mask file is unreadable, has an unsupported encoding or lacks metadata"""


class EmptyMaskError(MorphomicsError):
    """Mask has no occupied voxel"""


class NoSurfaceError(MorphomicsError):
    """Isosurface extraction produced nothing"""


class NonManifoldError(MorphomicsError):
    """Mesh is not a closed, oriented, edge-manifold surface"""


class DegenerateMeshError(MorphomicsError):
    """Mesh contains zero-area triangles where angles are required"""


class BoundaryEdgeError(MorphomicsError):
    """Dihedral angle requested on an edge with a single incident face"""


class EmptyHistogramError(MorphomicsError):
    """No value survived histogram windowing"""


class TrainingDataError(MorphomicsError):
    """Training table is empty, single-class, non-finite or missing labels"""


class SingleClassError(MorphomicsError):
    """Statistic needs both classes but received one"""


class ModelFormatError(MorphomicsError):
    """Model file is malformed or written by an incompatible version"""


class FeatureMismatchError(MorphomicsError):
    """Feature table columns do not match the model's feature names"""
