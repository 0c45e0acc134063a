"""Exact search over intersecting families."""

from __future__ import annotations

from .kneser import BudgetExceeded, KneserInstance, build_instance, independence_number
from .linksearch import SearchTimeout
from .oracle import (
    SearchConstraints,
    SearchResult,
    UnsupportedConstraints,
    class_name,
    dmax_profile,
    enumerate_maximal,
    max_family,
    nocommon_check,
    verify_claim36,
    verify_frankl,
    verify_nocommon,
    verify_theorem,
)

__all__ = [
    "BudgetExceeded",
    "KneserInstance",
    "SearchConstraints",
    "SearchResult",
    "SearchTimeout",
    "UnsupportedConstraints",
    "build_instance",
    "class_name",
    "dmax_profile",
    "enumerate_maximal",
    "independence_number",
    "max_family",
    "nocommon_check",
    "verify_claim36",
    "verify_frankl",
    "verify_nocommon",
    "verify_theorem",
]
