"""Coarse geometry on finite graph metrics."""
__version__ = "0.1.0"
