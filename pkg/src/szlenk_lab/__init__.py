"""Exotic sequence-space norms (Tsirelson, Schlumprecht, Baernstein,
quartic-quadratic Orlicz) and finite certificates for their Szlenk
derivations."""

from .kernels import BACKEND
from .vecspace import SparseVec

__all__ = ["BACKEND", "SparseVec"]
__version__ = "0.1.0"
