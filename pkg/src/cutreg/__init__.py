"""Gate-cut variational quantum circuits with overhead-regularized training."""

__version__ = "0.1.0"
