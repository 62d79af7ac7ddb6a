"""Query-counted estimators for noise sensitivity of monotone Boolean functions."""

__version__ = "0.1.0"
