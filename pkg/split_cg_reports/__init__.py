"""Split CG Reports - summary statistics and convergence insights from persisted traces."""

from .data_processor import TraceProcessor

__version__ = '1.0.0'
__all__ = ['TraceProcessor']
