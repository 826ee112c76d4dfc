"""Exact cyclic homology of group rings and the higher rho pairings built on it."""

from .groups import CyclicGroup, DihedralGroup, FiniteGroup, FreeAbelianGroup, FreeGroup, symmetric_group
from .scalars import GaussianRational, parse_scalar, render

__all__ = ["CyclicGroup", "DihedralGroup", "FiniteGroup", "FreeAbelianGroup", "FreeGroup",
           "symmetric_group", "GaussianRational", "parse_scalar", "render"]

__version__ = "0.1.0"
