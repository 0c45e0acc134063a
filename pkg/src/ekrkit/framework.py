"""Certificate pipeline for the polynomial-method bound on maximal intersecting families.

A maximal non-trivial intersecting k-uniform family is split around its most
frequent element ``p`` into F0 (blocks avoiding p) and F1 (blocks through p).
Together with the auxiliary families H, G and S this yields a triangular
condition system, and the counts of that system give the stability bounds.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Iterator

from .constructions import (
    RegimeError,
    binom,
    h_func,
    make_M_kj,
    theorem_bound,
)
from .family import (
    CANONICAL_LIMIT,
    CanonicalTooLarge,
    FamilyError,
    SetFamily,
    addable_witness,
    common_intersection,
    degrees,
    disjoint_pair,
    elements_of,
    find_embedding,
    full_mask,
    max_degree,
    sunflower_core,
)
from .polynomial import (
    ConditionSystem,
    IntersectionCondition,
    Row,
    basis_dimension,
    lemma22_certificate,
    pad_conditions,
)
from .report import VerificationReport, family_json

CLASSES = ("H", "F1", "G", "S")
ARROWS = tuple(f"{a}->{b}" for i, a in enumerate(CLASSES) for b in CLASSES[i:])
PAIRWISE_ROW_LIMIT = 1500


class FrameworkError(FamilyError):
    """Input rejected by ``decompose``; ``witness`` names the offending blocks or sets."""

    kind = "FrameworkError"

    def __init__(self, message: str, witness: Any = None) -> None:
        self.witness = witness
        super().__init__(message)


class NotIntersecting(FrameworkError):
    kind = "NotIntersecting"


class Trivial(FrameworkError):
    kind = "Trivial"


class NotMaximal(FrameworkError):
    kind = "NotMaximal"


@dataclass(frozen=True)
class Decomposition:
    n: int
    k: int
    p: int
    F: SetFamily
    F0: SetFamily
    F1: SetFamily
    H: SetFamily
    G: SetFamily
    S: SetFamily
    checked: bool = True

    @property
    def x(self) -> int:
        return len(self.F0)

    def summary(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "k": self.k,
            "p": self.p,
            "tie_break": "smallest element of maximum degree",
            "|F|": len(self.F),
            "|F0|": len(self.F0),
            "|F1|": len(self.F1),
            "|H|": len(self.H),
            "|G|": len(self.G),
            "|S|": len(self.S),
            "maximality_checked": self.checked,
        }


def _subsets_by_size(ground: list[int], sizes: range, extra: int = 0) -> list[int]:
    """Masks of subsets of ``ground`` by ascending size, lexicographic within a size."""
    bit = [1 << e for e in ground]
    out = []
    for r in sizes:
        for combo in combinations(bit, r):
            out.append(sum(combo) | extra)
    return out


def decompose(F: SetFamily, k: int, *, unchecked: bool = False) -> Decomposition:
    """Split ``F`` around its smallest most frequent element.

    ``unchecked`` skips the maximality test only; intersecting and
    non-triviality are always enforced.
    """
    n = F.n
    for b in F.blocks:
        if b.bit_count() != k:
            raise FamilyError(f"block {elements_of(b)} does not have size {k}")
    if k < 2:
        raise FamilyError("the framework needs k >= 2")
    if n < 2 * k + 1:
        raise RegimeError("n >= 2k+1", f"n={n}, k={k}")
    if not F.blocks:
        raise Trivial("the empty family has no decomposition", [])
    pair = disjoint_pair(F)
    if pair is not None:
        a, b = pair
        raise NotIntersecting(f"blocks {elements_of(a)} and {elements_of(b)} are disjoint",
                              [elements_of(a), elements_of(b)])
    core = common_intersection(F)
    if core:
        e = elements_of(core)[0]
        raise Trivial(f"every block contains {e}", {"element": e, "block": elements_of(F.blocks[0])})
    if not unchecked:
        extra = addable_witness(F, k)
        if extra is not None:
            raise NotMaximal(f"{elements_of(extra)} meets every block but is missing",
                             elements_of(extra))
    p, _ = max_degree(F)
    bit = 1 << p
    F0 = SetFamily(n, tuple(b for b in F.blocks if not b & bit))
    F1 = SetFamily(n, tuple(b for b in F.blocks if b & bit))
    rest = [e for e in range(1, n + 1) if e != p]
    H = SetFamily(n, tuple(_subsets_by_size(rest, range(0, k - 1))))
    G = SetFamily(n, tuple(_subsets_by_size(rest, range(0, k - 1), bit)))
    # a (k-1)-set avoiding p lies in the shadow of F1 only as F - {p}
    links = {b ^ bit for b in F1.blocks}
    f0 = F0.blocks
    S = tuple(
        c for c in _subsets_by_size(rest, range(k - 1, k))
        if c not in links and any(not c & b for b in f0)
    )
    return Decomposition(n, k, p, F, F0, F1, H, G, SetFamily(n, S), checked=not unchecked)


# ---------------------------------------------------------------------------
# condition system
# ---------------------------------------------------------------------------


def _by_size(fam: SetFamily) -> list[int]:
    return sorted(fam.blocks, key=lambda b: (b.bit_count(), elements_of(b)))


def ordered_rows(d: Decomposition) -> Iterator[tuple[str, int]]:
    """(class, set) in the order H, F1, G, S with the fixed tie-breaks."""
    for h in _by_size(d.H):
        yield "H", h
    for f in d.F1.blocks:
        yield "F1", f
    for g in _by_size(d.G):
        yield "G", g
    for s in d.S.blocks:
        yield "S", s


def _label(cls: str, mask: int) -> str:
    return f"{cls}:{','.join(map(str, elements_of(mask)))}"


def build_condition_system(d: Decomposition, *, include_total: bool = True) -> ConditionSystem:
    """The triangular system with rows H < F1 < G < S and width k-1.

    ``include_total=False`` drops the ``([n], n-k-1)`` condition from H-rows;
    it exists to show that condition is needed.
    """
    n, k, s = d.n, d.k, d.k - 1
    total = IntersectionCondition(full_mask(n), n - k - 1)
    bit = 1 << d.p
    rows = []
    for cls, a in ordered_rows(d):
        singles = [IntersectionCondition(1 << e, 0) for e in elements_of(a)]
        if cls == "H":
            conds = singles + [total] if include_total else singles
            if not conds:
                conds = [IntersectionCondition(0, 1)]
            witness = a
        elif cls == "F1":
            witness = a ^ bit
            conds = [IntersectionCondition(witness, beta) for beta in range(k - 1)]
        else:
            conds = singles
            witness = a
        rows.append(Row(_label(cls, a), witness, pad_conditions(conds, s)))
    return ConditionSystem(n, s, tuple(rows))


# ---------------------------------------------------------------------------
# Claim 3.1: the ten arrow cases
# ---------------------------------------------------------------------------


def _arrow_report(d: Decomposition, first: dict[str, dict], rows: int, mode: str) -> VerificationReport:
    cases = {arrow: arrow not in first for arrow in ARROWS}
    numbers = {"p": d.p, "rows": rows, "mode": mode, "cases": cases}
    witnesses = [dict(first[a], arrow=a) for a in ARROWS if a in first]
    return VerificationReport("claim31", not witnesses, numbers, witnesses)


def verify_claim31(d: Decomposition, system: ConditionSystem | None = None,
                   mode: str = "auto") -> VerificationReport:
    """Check every arrow case and report the first offending pair per case.

    ``pairwise`` scans all ordered pairs of the literal system.  ``index``
    uses that a row rejects ``X`` exactly when its key set lies inside ``X``
    (plus ``|X| != n-k-1`` for H-rows), so only subsets of each witness need
    looking up.  ``auto`` picks by size; a supplied ``system`` forces pairwise.
    """
    rows = len(d.H) + len(d.F1) + len(d.G) + len(d.S)
    if system is not None or mode == "pairwise" or (mode == "auto" and rows <= PAIRWISE_ROW_LIMIT):
        sys_ = system if system is not None else build_condition_system(d)
        return _arrow_report(d, _pairwise_scan(sys_), len(sys_), "pairwise")
    if mode not in ("auto", "index"):
        raise ValueError(f"unknown mode {mode!r}")
    return _arrow_report(d, _index_scan(d), rows, "index")


def _row_class(label: str) -> str:
    return label.split(":", 1)[0]


def _pairwise_scan(sys_: ConditionSystem) -> dict[str, dict]:
    rows = sys_.rows
    plain = [[(c.P, c.beta) for c in r.conds] for r in rows]
    classes = [_row_class(r.label) for r in rows]
    first: dict[str, dict] = {}
    for i, row in enumerate(rows):
        x = row.witness
        ci = classes[i]
        own = f"{ci}->{ci}"
        if own not in first and any((x & P).bit_count() == b for P, b in plain[i]):
            first[own] = {"i": row.label, "j": row.label, "reason": "own condition satisfied"}
        for j in range(i + 1, len(rows)):
            arrow = f"{ci}->{classes[j]}"
            if arrow in first:
                continue
            if all((x & P).bit_count() != b for P, b in plain[j]):
                first[arrow] = {"i": row.label, "j": rows[j].label, "reason": "no condition satisfied"}
    return first


def _index_scan(d: Decomposition) -> dict[str, dict]:
    n, k, p = d.n, d.k, d.p
    bit = 1 << d.p
    h_total = n - k - 1
    order = list(ordered_rows(d))
    keys: dict[int, list[int]] = {}
    for pos, (cls, a) in enumerate(order):
        key = a ^ bit if cls == "F1" else a
        keys.setdefault(key, []).append(pos)
    profile: dict[tuple[int, bool], int] = {}
    for cls, a in order:
        key = a ^ bit if cls == "F1" else a
        sig = (key.bit_count(), bool(key & bit))
        profile[sig] = profile.get(sig, 0) + 1
    first: dict[str, dict] = {}
    for i, (ci, a) in enumerate(order):
        key_i = a ^ bit if ci == "F1" else a
        sig = (key_i.bit_count(), bool(key_i & bit))
        profile[sig] -= 1
        if not profile[sig]:
            del profile[sig]
        x = key_i  # witness: F - {p} for F1-rows, the set itself otherwise
        size = x.bit_count()
        own = f"{ci}->{ci}"
        if own not in first and ci == "H" and size == h_total:
            first[own] = {"i": _label(ci, a), "j": _label(ci, a), "reason": "own condition satisfied"}
        elems = elements_of(x)
        without_p = [e for e in elems if e != p]
        hits: list[int] = []
        for r, has_p in profile:
            if has_p:
                if not x & bit or r - 1 > len(without_p):
                    continue
                subsets = (sum(1 << e for e in c) | bit for c in combinations(without_p, r - 1))
            else:
                if r > len(without_p):
                    continue
                subsets = (sum(1 << e for e in c) for c in combinations(without_p, r))
            for y in subsets:
                positions = keys.get(y)
                if not positions:
                    continue
                for j in positions[bisect_right(positions, i):]:
                    cj = order[j][0]
                    if cj == "H" and size == h_total:
                        continue
                    hits.append(j)
                    break
        for j in sorted(hits):
            cj, b = order[j]
            arrow = f"{ci}->{cj}"
            if arrow not in first:
                first[arrow] = {"i": _label(ci, a), "j": _label(cj, b), "reason": "no condition satisfied"}
    return first


# ---------------------------------------------------------------------------
# counting certificates
# ---------------------------------------------------------------------------


def framework_lemma22(d: Decomposition, claim31: VerificationReport,
                      rank_limit: int = 400) -> VerificationReport:
    """Row-count bound for the framework system, with exact rank when the basis is small."""
    s = d.k - 1
    dim = basis_dimension(d.n, s)
    rows = len(d.H) + len(d.F1) + len(d.G) + len(d.S)
    if rows <= PAIRWISE_ROW_LIMIT or dim <= rank_limit:
        report = lemma22_certificate(build_condition_system(d), rank_limit, triangular=claim31.passed)
    else:
        numbers: dict[str, Any] = {"rows": rows, "n": d.n, "s": s, "bound": dim,
                                   "triangular": claim31.passed, "rank": None}
        if not claim31.passed:
            numbers["bound_asserted"] = False
            return VerificationReport("lemma22", False, numbers, [{"reason": "claim31 failed"}])
        numbers["bound_asserted"] = True
        ok = rows <= dim
        report = VerificationReport("lemma22", ok, numbers, [] if ok else [{"rows": rows, "bound": dim}])
    hg = sum(binom(d.n - 1, i) for i in range(d.k - 1))
    report.numbers["|H|=|G|"] = hg
    if len(d.H) != hg or len(d.G) != hg:
        report.passed = False
        report.witnesses.append({"|H|": len(d.H), "|G|": len(d.G), "expected": hg})
    return report


def f1_bound_certificate(d: Decomposition, claim31: VerificationReport) -> VerificationReport:
    top = binom(d.n - 1, d.k - 1)
    f1, s, x = len(d.F1), len(d.S), d.x
    dmax = max(degrees(d.F)[1:])
    numbers = {
        "|F1|": f1,
        "|S|": s,
        "|F0|": x,
        "|F|": len(d.F),
        "binom(n-1,k-1)": top,
        "f1_bound": top - s,
        "family_bound": top - (s - x),
        "d_max": dmax,
    }
    witnesses = []
    if not claim31.passed:
        witnesses.append({"reason": "claim31 failed; the bound has no support"})
    if f1 > top - s:
        witnesses.append({"reason": "|F1| exceeds binom(n-1,k-1) - |S|"})
    if len(d.F) > top - (s - x):
        witnesses.append({"reason": "|F| exceeds binom(n-1,k-1) - (|S| - |F0|)"})
    if dmax != f1:
        witnesses.append({"reason": "d_max differs from |F1|", "d_max": dmax})
    return VerificationReport("lemma22", not witnesses, numbers, witnesses, ["f1 bound"])


def s_as_union(d: Decomposition) -> set[int]:
    """Union over F0 blocks of the (k-1)-subsets of [n] - (F ∪ {p})."""
    out: set[int] = set()
    for b in d.F0.blocks:
        ground = [e for e in range(1, d.n + 1) if e != d.p and not b >> e & 1]
        bits = [1 << e for e in ground]
        out.update(sum(c) for c in combinations(bits, d.k - 1))
    return out


def verify_claim32(d: Decomposition) -> VerificationReport:
    rhs = s_as_union(d)
    lhs = d.S.block_set
    numbers = {"|S|": len(lhs), "|union|": len(rhs)}
    if lhs == rhs:
        return VerificationReport("claim32", True, numbers)
    only_s = sorted((elements_of(m) for m in lhs - rhs))[:20]
    only_u = sorted((elements_of(m) for m in rhs - lhs))[:20]
    numbers["|S - union|"] = len(lhs - rhs)
    numbers["|union - S|"] = len(rhs - lhs)
    return VerificationReport("claim32", False, numbers, [{"S_only": only_s, "union_only": only_u}])


@dataclass(frozen=True)
class CPartition:
    cells: tuple[SetFamily, ...]

    def sizes(self) -> list[int]:
        return [len(c) for c in self.cells]


def compute_c_partition(d: Decomposition) -> CPartition:
    """C_i: (k-1)-sets avoiding p that miss F_i but meet F_1, ..., F_{i-1} (F0 in stored order)."""
    rest = [e for e in range(1, d.n + 1) if e != d.p]
    f0 = d.F0.blocks
    cells: list[list[int]] = [[] for _ in f0]
    for c in _subsets_by_size(rest, range(d.k - 1, d.k)):
        for i, b in enumerate(f0):
            if not c & b:
                cells[i].append(c)
                break
    return CPartition(tuple(SetFamily(d.n, tuple(cell)) for cell in cells))


def sunflower_sum(n: int, k: int, x: int) -> int:
    return sum(binom(n - k - j, k - j) for j in range(1, min(x, k) + 1))


def verify_claim33(d: Decomposition, part: CPartition | None = None) -> VerificationReport:
    part = part or compute_c_partition(d)
    n, k, x = d.n, d.k, d.x
    sizes = part.sizes()
    bound = sunflower_sum(n, k, x)
    union: set[int] = set()
    overlap = False
    for cell in part.cells:
        if union & cell.block_set:
            overlap = True
        union |= cell.block_set
    numbers = {"|S|": len(d.S), "x": x, "bound": bound, "cells": sizes}
    witnesses: list[Any] = []
    if overlap:
        witnesses.append({"reason": "cells overlap"})
    if union != d.S.block_set:
        witnesses.append({"reason": "cells do not cover S exactly",
                          "|union|": len(union), "|S|": len(d.S)})
    for i in range(1, min(x, k) + 1):
        need = binom(n - k - i, k - i)
        if sizes[i - 1] < need:
            witnesses.append({"cell": i, "size": sizes[i - 1], "needed": need})
    if len(d.S) < bound:
        witnesses.append({"reason": "|S| below the sum bound"})
    return VerificationReport("claim33", not witnesses, numbers, witnesses)


def verify_claim34(d: Decomposition) -> VerificationReport:
    """Equality in the |S| bound holds exactly for sunflowers with k-1 common elements."""
    n, k, x = d.n, d.k, d.x
    base = sunflower_sum(n, k, x)
    extra = binom(n - k - 3, k - 2)
    if x >= 2:
        core = sunflower_core(d.F0)
        is_sunflower = core is not None and len(core) == k - 1
    else:
        # one block: the pairwise condition is vacuous
        is_sunflower = x == 1
    numbers = {"x": x, "|S|": len(d.S), "sum": base, "strengthened": base + extra,
               "sunflower_k-1": is_sunflower, "in_range": 1 <= x <= n - k}
    if not 1 <= x <= n - k:
        return VerificationReport("claim34", True, numbers, notes=["x outside [1, n-k]; claim not applicable"])
    equal = len(d.S) == base
    witnesses: list[Any] = []
    if equal != is_sunflower:
        witnesses.append({"reason": "equality and sunflower structure disagree",
                          "equality": equal, "F0": d.F0.sets()})
    if not is_sunflower and len(d.S) < base + extra:
        witnesses.append({"reason": "strengthened bound fails", "F0": d.F0.sets()})
    return VerificationReport("claim34", not witnesses, numbers, witnesses)


# ---------------------------------------------------------------------------
# chains
# ---------------------------------------------------------------------------


def _level_claim(t: int) -> str:
    return f"thm{t + 1}" if t <= 3 else "thm5-property"


def embeds_in(F: SetFamily, T: SetFamily, k: int) -> bool:
    """Whether some relabelling of ``F`` lies inside ``T``, for maximal intersecting ``F``.

    For such ``F`` and an intersecting ``T`` an embedding is an isomorphism, so
    unequal sizes or degree sequences already decide; only an ambiguous case
    above the canonical limit is refused.
    """
    if len(F) != len(T):
        return False
    if sorted(degrees(F)[1:]) != sorted(degrees(T)[1:]):
        return False
    if F.n > CANONICAL_LIMIT:
        raise CanonicalTooLarge(f"n={F.n} is too large to decide isomorphism (limit {CANONICAL_LIMIT})")
    return find_embedding(F, T) is not None


def certificate_chain(F: SetFamily, k: int, *, unchecked: bool = False,
                      d: Decomposition | None = None) -> tuple[Decomposition, list[VerificationReport]]:
    """decompose, claim31, lemma22, f1 bound, claim32 (unless unchecked), claim33, claim34."""
    d = d or decompose(F, k, unchecked=unchecked)
    c31 = verify_claim31(d)
    reports = [c31, framework_lemma22(d, c31), f1_bound_certificate(d, c31)]
    if not unchecked:
        reports.append(verify_claim32(d))
    part = compute_c_partition(d)
    reports.append(verify_claim33(d, part))
    reports.append(verify_claim34(d))
    return d, reports


def level_t_certificate(F: SetFamily, t: int, k: int | None = None, *,
                        chain: list[VerificationReport] | None = None) -> VerificationReport:
    """Run the full chain on ``F`` and compare |F| with the level-t bound."""
    k = k if k is not None else F.uniformity()
    if k is None:
        raise FamilyError("level_t_certificate needs a uniform nonempty family")
    n = F.n
    if t < 1:
        raise FamilyError("level t must be at least 1")
    bound = theorem_bound(t, n, k)
    d = decompose(F, k)
    for t0 in range(2, t + 1):
        template = make_M_kj(n, k, t0 - 1)
        if embeds_in(F, template, k):
            raise FamilyError(f"precondition violated: family lies in a copy of M_{{{k},{t0 - 1}}}")
    if chain is None:
        d, reports = certificate_chain(F, k, d=d)
    else:
        reports = chain
    x = d.x
    top = binom(n - 1, k - 1)
    chain_bound = top - h_func(t, n, k) if 1 <= t <= n - k else None
    generic = chain_bound is not None and chain_bound <= bound.value
    numbers: dict[str, Any] = {
        "t": t, "n": n, "k": k, "|F|": len(F), "x": x, "p": d.p,
        "theorem_bound": bound.value, "formula_id": bound.formula_id,
        "chain_bound": chain_bound, "x_in_[t,n-k]": t <= x <= n - k,
        "generic_chain_suffices": generic, "oracle_required": not generic,
        "subreports": {f"{r.claim_id}{'/' + r.notes[0] if r.notes else ''}": r.passed for r in reports},
    }
    witnesses: list[Any] = [dict(claim=r.claim_id, witnesses=r.witnesses) for r in reports if not r.passed]
    if len(F) > bound.value:
        witnesses.append({"reason": "family exceeds the level bound", "size": len(F)})
    if generic and t <= x <= n - k and len(F) > chain_bound:
        witnesses.append({"reason": "family exceeds the chain bound", "size": len(F)})
    notes = ["oracle required: the generic chain does not reach the level bound"] if not generic else []
    return VerificationReport(_level_claim(t), not witnesses, numbers, witnesses, notes)


def certificate_json(d: Decomposition, reports: list[VerificationReport]) -> list[dict[str, Any]]:
    out = [r.to_json() for r in reports]
    for item in out:
        item.setdefault("numbers", {})["decomposition"] = d.summary()
    return out


__all__ = [
    "ARROWS",
    "CPartition",
    "Decomposition",
    "FrameworkError",
    "NotIntersecting",
    "NotMaximal",
    "Trivial",
    "build_condition_system",
    "certificate_chain",
    "compute_c_partition",
    "decompose",
    "f1_bound_certificate",
    "family_json",
    "level_t_certificate",
    "verify_claim31",
    "verify_claim32",
    "verify_claim33",
    "verify_claim34",
]
