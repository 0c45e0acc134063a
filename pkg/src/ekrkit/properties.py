"""Level-t checks for t >= 4, where exhaustive search is out of reach.

Instead of searching, these compare the constructed extremal family with the
level-t bound, run its certificate and check the gap inequality.
"""

from __future__ import annotations

from typing import Any

from .constructions import (
    binom,
    claim41_gap,
    make_M_kj,
    smallest_n,
    theorem_bound,
)
from .framework import level_t_certificate
from .report import VerificationReport


def level_t_property(t: int, k: int, n: int | None = None, *, certify: bool = True) -> VerificationReport:
    """|M_{k,t}| equals the level-t bound, its certificate passes and the gap is positive."""
    n = smallest_n(t, k) if n is None else n
    bound = theorem_bound(t, n, k)
    fam = make_M_kj(n, k, t)
    numbers: dict[str, Any] = {
        "t": t, "n": n, "k": k, "bound": bound.value, "formula_id": bound.formula_id,
        "|M_{k,t}|": len(fam), "top": binom(n - 1, k - 1),
    }
    witnesses: list[Any] = []
    if len(fam) != bound.value:
        witnesses.append({"reason": "size differs from bound", "size": len(fam), "bound": bound.value})
    if t >= 4:
        gap = claim41_gap(n, k, t)
        numbers["claim41_gap"] = gap
        if gap <= 0:
            witnesses.append({"reason": "gap is not positive", "gap": gap})
    if certify:
        cert = level_t_certificate(fam, t, k)
        numbers["certificate"] = {"claim_id": cert.claim_id, "passed": cert.passed,
                                  "oracle_required": cert.numbers["oracle_required"]}
        if not cert.passed:
            witnesses.append({"reason": "certificate failed", "report": cert.to_json()})
    claim = "thm5-property" if t >= 4 else f"thm{t + 1}"
    return VerificationReport(claim, not witnesses, numbers, witnesses)
