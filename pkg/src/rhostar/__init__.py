"""Exact tools for permutation densities, flag algebras and the rho* certificate."""
from __future__ import annotations

from .perms import (
    NU,
    RHO_STAR,
    XI,
    FormalSum,
    Permutation,
    density,
    parse_permutation,
    project_up,
)

__all__ = [
    "Permutation",
    "FormalSum",
    "parse_permutation",
    "density",
    "project_up",
    "RHO_STAR",
    "NU",
    "XI",
]
__version__ = "0.1.0"
