# morphomics/telemetry/__init__.py

from .run_tracker import RunTracker

__all__ = ['RunTracker']
