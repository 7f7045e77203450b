"""Normalized Ricci flow on generalized Wallach spaces and the positive-Ricci region."""

from .core import DomainError, GwsParams, MetricPoint

__version__ = "0.1.0"

__all__ = ["DomainError", "GwsParams", "MetricPoint", "__version__"]
