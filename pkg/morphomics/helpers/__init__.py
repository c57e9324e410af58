# morphomics/helpers/__init__.py

from .seeding import derive_seed

__all__ = ['derive_seed']
