"""Split conditional gradient solver package."""

__version__ = '1.0.0'
