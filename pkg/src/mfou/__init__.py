"""Simulation and inference for multivariate fractional OU processes."""

from .model import (
    InvalidModelError,
    ModelParams,
    PairParams,
    coherence,
    coherence_ellipse,
    make_pair,
)

__version__ = "0.1.0"

__all__ = [
    "InvalidModelError",
    "ModelParams",
    "PairParams",
    "coherence",
    "coherence_ellipse",
    "make_pair",
]
