"""Exact computations around intersecting set families and their stability levels."""

from __future__ import annotations

__version__ = "0.1.0"

from .constructions import (
    NamedFamilySpec,
    default_K2,
    make_K,
    make_K2,
    make_M_i,
    make_M_kj,
    make_star,
    theorem_bound,
)
from .family import SetFamily, canonical_form, is_intersecting, is_maximal_intersecting
from .framework import certificate_chain, decompose, level_t_certificate
from .report import VerificationReport

__all__ = [
    "NamedFamilySpec",
    "SetFamily",
    "VerificationReport",
    "__version__",
    "canonical_form",
    "certificate_chain",
    "decompose",
    "default_K2",
    "is_intersecting",
    "is_maximal_intersecting",
    "level_t_certificate",
    "make_K",
    "make_K2",
    "make_M_i",
    "make_M_kj",
    "make_star",
    "theorem_bound",
]
