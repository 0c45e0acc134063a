"""Exact maximum intersecting families under forbidden-configuration constraints.

Every constraint except the degree cap and a fixed F0 size is preserved when
blocks are added, so an optimal family can be grown to a maximal one and must
already be maximal.  The oracle therefore lists maximal families of size at
least ``L`` (lowering ``L`` one step at a time) and filters them.  A degree
cap is handled by deleting as few blocks as possible from each such maximal
family.  A fixed F0 size runs a separate search that keeps the links optimal.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from ..constructions import (
    NamedFamilySpec,
    binom,
    m_i_maxdeg,
    m_i_size,
    make_M_i,
    make_M_kj,
    make_star,
    default_K,
    default_K2,
    theorem_bound,
)
from ..family import (
    SetFamily,
    canonical_form,
    common_intersection,
    degrees,
    elements_of,
    is_intersecting,
    is_maximal_intersecting,
    is_star,
    is_subfamily_up_to_iso,
    max_degree,
)
from ..report import VerificationReport, family_json
from .kneser import BudgetExceeded, KneserInstance, build_instance
from .linksearch import SearchTimeout, TaskResult, link_space

DEFAULT_TIMEOUT = 600.0
THREADS_ENV = "EKRKIT_THREADS"
ENUMERATION_BUDGET = 40


class UnsupportedConstraints(ValueError):
    pass


@dataclass(frozen=True)
class SearchConstraints:
    forbid_trivial: bool = False
    forbidden_templates: tuple[SetFamily, ...] = ()
    fixed_f0: int | None = None
    max_degree_cap: int | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "forbid_trivial": self.forbid_trivial,
            "forbidden_templates": [family_json(T) for T in self.forbidden_templates],
            "fixed_f0": self.fixed_f0,
            "max_degree_cap": self.max_degree_cap,
        }


@dataclass
class SearchResult:
    """``optimum`` is None when no family satisfies the constraints."""

    optimum: int | None
    witnesses: list[SetFamily]
    node_count: int
    elapsed: float
    classes: list[str] = field(default_factory=list)

    @property
    def status(self) -> str:
        return "optimal" if self.optimum is not None else "infeasible"

    def to_json(self, include_elapsed: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "status": self.status,
            "optimum": self.optimum,
            "witness_classes": self.classes,
            "witnesses": [family_json(W) for W in self.witnesses],
            "node_count": self.node_count,
        }
        if include_elapsed:
            out["elapsed"] = round(self.elapsed, 3)
        return out


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None


# ---------------------------------------------------------------------------
# naming
# ---------------------------------------------------------------------------


def named_classes(n: int, k: int) -> list[tuple[str, SetFamily]]:
    """Canonical forms of the named families defined at (n, k)."""
    return list(_named_classes(n, k))


_NAMED_CACHE: dict[tuple[int, int], tuple[tuple[str, SetFamily], ...]] = {}


def _named_classes(n: int, k: int) -> tuple[tuple[str, SetFamily], ...]:
    key = (n, k)
    if key not in _NAMED_CACHE:
        out: list[tuple[str, SetFamily]] = [("star", canonical_form(make_star(n, k, 1)))]
        if k >= 2 and n >= 2 * k + 1:
            for i in range(3, k + 2):
                out.append((f"M_{i}", canonical_form(make_M_i(n, k, i))))
            if k >= 3:
                for j in range(1, n - k + 1):
                    out.append((f"M_{{{k},{j}}}", canonical_form(make_M_kj(n, k, j))))
            if k >= 3:
                out.append(("K_2", canonical_form(default_K2(n, k))))
            for s in range(1, k - 2):
                out.append((f"K(s={s})", canonical_form(default_K(n, k, s))))
        _NAMED_CACHE[key] = tuple(out)
    return _NAMED_CACHE[key]


def class_name(F: SetFamily, k: int) -> str:
    """Names of the named families isomorphic to ``F`` joined by '=', or 'unnamed'."""
    canon = canonical_form(F)
    names = [name for name, C in _named_classes(F.n, k) if C == canon]
    return "=".join(names) if names else "unnamed"


# ---------------------------------------------------------------------------
# maximal families
# ---------------------------------------------------------------------------


_MAXIMAL_CACHE: dict[tuple[int, int, int], tuple[list[SetFamily], int]] = {}


def _run_task(args: tuple[int, int, tuple[str, int], str, int, float]) -> TaskResult:
    n, k, task, mode, value, deadline = args
    sp = link_space(n, k)
    if mode == "maximal":
        return sp.maximal_task(task, value, deadline)
    return sp.fixed_task(task, value, deadline)


def _run_all(n: int, k: int, mode: str, value: int, deadline: float) -> list[TaskResult]:
    sp = link_space(n, k)
    jobs = [(n, k, task, mode, value, deadline) for task in sp.tasks()]
    workers = min(thread_count(), len(jobs))
    if workers <= 1:
        return [_run_task(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_task, jobs))


def _to_family(n: int, k: int, f0: Iterable[int], links: int) -> SetFamily:
    sp = link_space(n, k)
    blocks = [sp.cands[j] << 1 for j in f0]
    rest = links
    while rest:
        low = rest & -rest
        rest ^= low
        blocks.append((sp.links[low.bit_length() - 1] << 1) | 2)
    return SetFamily(n, tuple(blocks))


def maximal_at_least(n: int, k: int, L: int, deadline: float) -> tuple[list[SetFamily], int]:
    """Maximal intersecting families of size >= L, each labelled with 1 of maximum degree.

    The same isomorphism class may appear several times.  The full star is
    included when it is large enough.
    """
    key = (n, k, L)
    if key in _MAXIMAL_CACHE:
        fams, nodes = _MAXIMAL_CACHE[key]
        return list(fams), nodes
    fams: list[SetFamily] = []
    if binom(n - 1, k - 1) >= L:
        fams.append(make_star(n, k, 1))
    nodes = 0
    for res in _run_all(n, k, "maximal", L, deadline):
        nodes += res.nodes
        fams.extend(_to_family(n, k, s.f0, s.links) for s in res.solutions)
    _MAXIMAL_CACHE[key] = (list(fams), nodes)
    return fams, nodes


# ---------------------------------------------------------------------------
# constraints
# ---------------------------------------------------------------------------


def _passes(F: SetFamily, c: SearchConstraints) -> bool:
    if c.forbid_trivial and (not F.blocks or is_star(F)):
        return False
    if c.max_degree_cap is not None and F.blocks and max_degree(F)[1] > c.max_degree_cap:
        return False
    return not any(is_subfamily_up_to_iso(F, T) for T in c.forbidden_templates)


def satisfies_constraints(F: SetFamily, c: SearchConstraints) -> bool:
    """Intersecting plus every constraint, with fixed_f0 read at the smallest max-degree element."""
    if not is_intersecting(F) or not _passes(F, c):
        return False
    if c.fixed_f0 is not None:
        if not F.blocks:
            return c.fixed_f0 == 0
        p, _ = max_degree(F)
        return sum(1 for b in F.blocks if not b >> p & 1) == c.fixed_f0
    return True


def capped_subfamilies(F: SetFamily, cap: int, L: int,
                       keep: Callable[[SetFamily], bool]) -> list[SetFamily]:
    """Subfamilies with every degree <= cap, at least L blocks, minimal in what they delete.

    Each branch deletes one block through the element with the largest excess;
    blocks passed over earlier in the same branch stay, so no deletion set is
    produced twice.  Leaves failing ``keep`` are dropped (``keep`` must be
    inherited by subfamilies in the negative sense: a failing family has no
    passing subfamily).
    """
    blocks = list(F.blocks)
    budget0 = len(blocks) - L
    deg = degrees(F)
    out: list[SetFamily] = []

    def rec(removed: int, kept: int, budget: int) -> None:
        excess = [max(0, d - cap) for d in deg]
        need = max(excess[1:], default=0)
        if need > budget:
            return
        if need == 0:
            G = SetFamily(F.n, tuple(b for i, b in enumerate(blocks) if not removed >> i & 1))
            if keep(G):
                out.append(G)
            return
        v = excess.index(need, 1)
        choices = [i for i, b in enumerate(blocks)
                   if b >> v & 1 and not (removed | kept) >> i & 1]
        held = 0
        for i in choices:
            for e in elements_of(blocks[i]):
                deg[e] -= 1
            rec(removed | 1 << i, kept | held, budget - 1)
            for e in elements_of(blocks[i]):
                deg[e] += 1
            held |= 1 << i

    if budget0 >= 0:
        rec(0, 0, budget0)
    return out


def _dedupe(fams: Iterable[SetFamily]) -> list[SetFamily]:
    seen: dict[SetFamily, None] = {}
    for F in fams:
        seen.setdefault(canonical_form(F), None)
    return sorted(seen, key=lambda F: (len(F), F.sets()))


def _check_templates(n: int, k: int, c: SearchConstraints) -> None:
    for T in c.forbidden_templates:
        if T.n != n or any(b.bit_count() != k for b in T.blocks):
            raise ValueError(f"template is not a {k}-uniform family on [{n}]")


def max_family(inst: KneserInstance, constraints: SearchConstraints = SearchConstraints(),
               timeout: float = DEFAULT_TIMEOUT) -> SearchResult:
    """Largest intersecting family under ``constraints`` with every optimal class."""
    n, k = inst.n, inst.k
    _check_templates(n, k, constraints)
    start = time.monotonic()
    deadline = start + timeout
    if constraints.fixed_f0 is not None:
        if constraints.forbidden_templates or constraints.max_degree_cap is not None:
            raise UnsupportedConstraints("fixed_f0 cannot be combined with templates or a degree cap")
        return _fixed_f0(inst, constraints, start, deadline)
    nodes = 0
    cap = constraints.max_degree_cap
    for L in range(binom(n - 1, k - 1), 0, -1):
        try:
            fams, used = maximal_at_least(n, k, L, deadline)
        except SearchTimeout as exc:
            exc.nodes += nodes
            exc.args = (f"timeout after {timeout:g}s while searching sizes >= {L}",)
            exc.upper_bound = L
            raise
        nodes += used
        if cap is None:
            feasible = [F for F in fams if _passes(F, constraints)]
        else:
            feasible = []
            for F in fams:
                feasible.extend(capped_subfamilies(F, cap, L, lambda G: _passes(G, constraints)))
        if feasible:
            best = max(len(F) for F in feasible)
            wits = _dedupe(F for F in feasible if len(F) == best)
            return SearchResult(best, wits, nodes, time.monotonic() - start,
                                [class_name(W, k) for W in wits])
    return SearchResult(None, [], nodes, time.monotonic() - start)


def _fixed_f0(inst: KneserInstance, c: SearchConstraints, start: float, deadline: float) -> SearchResult:
    n, k, x = inst.n, inst.k, c.fixed_f0
    assert x is not None
    if x < 0:
        raise ValueError("fixed_f0 must be non-negative")
    if x == 0:
        star = make_star(n, k, 1)
        if c.forbid_trivial:
            return SearchResult(None, [], 1, time.monotonic() - start)
        return SearchResult(len(star), [canonical_form(star)], 1, time.monotonic() - start, ["star"])
    results = _run_all(n, k, "fixed", x, deadline)
    nodes = sum(r.nodes for r in results)
    best = max(r.best for r in results)
    if best < 0:
        return SearchResult(None, [], nodes, time.monotonic() - start)
    fams = [_to_family(n, k, s.f0, s.links) for r in results if r.best == best for s in r.solutions]
    if c.forbid_trivial:
        fams = [F for F in fams if not is_star(F)]
        if not fams:
            return SearchResult(None, [], nodes, time.monotonic() - start)
    wits = _dedupe(fams)
    return SearchResult(x + best, wits, nodes, time.monotonic() - start,
                        [class_name(W, k) for W in wits])


# ---------------------------------------------------------------------------
# theorem checks
# ---------------------------------------------------------------------------


def _canon_set(specs: Iterable[SetFamily]) -> set[SetFamily]:
    return {canonical_form(F) for F in specs}


def hm_extremal(n: int, k: int) -> list[SetFamily]:
    return [make_M_i(n, k, 3), make_M_i(n, k, 4)] if k == 3 else [make_M_i(n, k, k + 1)]


def level_setup(t: int, n: int, k: int) -> tuple[SearchConstraints, list[SetFamily]]:
    """Constraints assembled from the level-t hypotheses and the expected extremal families."""
    if t == 0:
        return SearchConstraints(), [make_star(n, k, 1)]
    if k < 3:
        raise ValueError("levels >= 1 are checked for k >= 3")
    if t == 1:
        return SearchConstraints(forbid_trivial=True), hm_extremal(n, k)
    templates = hm_extremal(n, k)
    if t == 2:
        expected = ([make_M_kj(n, 4, 2), make_M_i(n, 4, 3), make_M_i(n, 4, 4)]
                    if k == 4 else [make_M_kj(n, k, 2)])
        return SearchConstraints(True, tuple(templates)), expected
    if t == 3:
        if k < 4:
            raise ValueError("level 3 needs k >= 4")
        templates.append(make_M_kj(n, k, 2))
        if k == 4:
            templates += [make_M_i(n, k, 3), make_M_i(n, k, 4)]
        if n <= 3 * k - 3:
            expected = [default_K2(n, k)] + ([make_M_kj(n, 4, 3)] if k == 4 else [])
        elif k == 5:
            expected = [make_M_kj(n, 5, 3), make_M_i(n, 5, 5)]
        else:
            expected = [make_M_kj(n, k, 3)]
        uniq = _dedupe(templates)
        return SearchConstraints(True, tuple(uniq)), expected
    raise ValueError("the oracle covers levels 0 to 3")


def _class_report(claim: str, res: SearchResult, value: int, expected: list[SetFamily],
                  k: int, numbers: dict[str, Any]) -> VerificationReport:
    want = _canon_set(expected)
    got = set(res.witnesses)
    numbers = dict(numbers)
    numbers.update({
        "optimum": res.optimum,
        "expected_optimum": value,
        "witness_classes": res.classes,
        "expected_classes": sorted(class_name(F, k) for F in want),
        "node_count": res.node_count,
    })
    witnesses: list[Any] = []
    if res.optimum != value:
        witnesses.append({"reason": "optimum differs", "optimum": res.optimum, "expected": value})
    if got != want:
        witnesses.append({
            "reason": "extremal classes differ",
            "unexpected": [family_json(F) for F in sorted(got - want, key=lambda F: F.sets())],
            "missing": sorted(class_name(F, k) for F in want - got),
        })
    return VerificationReport(claim, not witnesses, numbers, witnesses)


def verify_theorem(t: int, n: int, k: int, timeout: float = DEFAULT_TIMEOUT,
                   budget: int | None = None) -> VerificationReport:
    inst = build_instance(n, k) if budget is None else build_instance(n, k, budget)
    bound = theorem_bound(t, n, k)
    constraints, expected = level_setup(t, n, k)
    res = max_family(inst, constraints, timeout)
    numbers = {"t": t, "n": n, "k": k, "formula_id": bound.formula_id}
    return _class_report(f"thm{t + 1}", res, bound.value, expected, k, numbers)


def verify_frankl(n: int, k: int, i: int, timeout: float = DEFAULT_TIMEOUT) -> VerificationReport:
    inst = build_instance(n, k)
    cap = m_i_maxdeg(n, k, i)
    res = max_family(inst, SearchConstraints(max_degree_cap=cap), timeout)
    expected = [make_M_i(n, k, i)] + ([make_M_i(n, k, 3)] if i == 4 else [])
    numbers = {"n": n, "k": k, "i": i, "degree_cap": cap}
    return _class_report("frankl", res, m_i_size(n, k, i), expected, k, numbers)


def dmax_profile(n: int, k: int, timeout: float = DEFAULT_TIMEOUT) -> list[tuple[int, int]]:
    """(x, d_max(x)) for x = 0, 1, ... up to the last feasible x.

    Feasibility is inherited downwards (dropping a block of F0 keeps 1 of
    maximum degree), so the first infeasible x ends the profile.
    """
    inst = build_instance(n, k)
    deadline = time.monotonic() + timeout
    out = []
    x = 0
    while True:
        left = deadline - time.monotonic()
        if left <= 0:
            raise SearchTimeout("timeout during the d_max profile")
        res = max_family(inst, SearchConstraints(fixed_f0=x), left)
        if res.optimum is None:
            return out
        out.append((x, res.optimum - x))
        x += 1


def verify_claim36(n: int, k: int, timeout: float = DEFAULT_TIMEOUT) -> VerificationReport:
    profile = dmax_profile(n, k, timeout)
    bad = [(a, b) for (a, da), (b, db) in zip(profile, profile[1:]) if db > da]
    numbers: dict[str, Any] = {"n": n, "k": k, "profile": {str(x): d for x, d in profile},
                               "feasible_x": [x for x, _ in profile]}
    if n - k in dict(profile) and n >= 2 * k + 1:
        numbers["d_max(n-k)"] = dict(profile)[n - k]
        numbers["d_max(M_k)"] = m_i_maxdeg(n, k, k) if k >= 3 else None
    witnesses = [{"x1": b, "x2": a, "d_max(x1)": dict(profile)[b], "d_max(x2)": dict(profile)[a]}
                 for a, b in bad]
    return VerificationReport("claim36", not witnesses, numbers, witnesses)


def enumerate_maximal(n: int, k: int, budget: int = ENUMERATION_BUDGET,
                      timeout: float = DEFAULT_TIMEOUT) -> list[SetFamily]:
    """Every maximal non-trivial intersecting k-uniform family on [n], up to isomorphism."""
    if binom(n, k) > budget:
        raise BudgetExceeded(f"binom({n},{k}) = {binom(n, k)} exceeds the enumeration budget {budget}")
    fams, _ = maximal_at_least(n, k, 1, time.monotonic() + timeout)
    return _dedupe(F for F in fams if not is_star(F))


def nocommon_check(F: SetFamily, k: int, *, unchecked: bool = False) -> dict[str, Any]:
    """Whether the blocks avoiding the max-degree element share no element, when there are >= n-2 of them."""
    if not unchecked and not is_maximal_intersecting(F, k):
        raise ValueError("family is not maximal; use unchecked to test it anyway")
    p, _ = max_degree(F)
    f0 = SetFamily(F.n, tuple(b for b in F.blocks if not b >> p & 1))
    if len(f0) < F.n - 2:
        return {"status": "skipped", "x": len(f0), "p": p}
    core = common_intersection(f0)
    return {"status": "pass" if not core else "fail", "x": len(f0), "p": p, "common": elements_of(core)}


def verify_nocommon(n: int, k: int, timeout: float = DEFAULT_TIMEOUT) -> VerificationReport:
    if k != 3:
        raise ValueError("the claim concerns k = 3")
    fams = enumerate_maximal(n, k, timeout=timeout)
    checked = skipped = 0
    witnesses = []
    for F in fams:
        out = nocommon_check(F, k)
        if out["status"] == "skipped":
            skipped += 1
            continue
        checked += 1
        if out["status"] == "fail":
            witnesses.append({"family": family_json(F), **out})
    numbers = {"n": n, "k": k, "families": len(fams), "checked": checked, "skipped": skipped}
    return VerificationReport("nocommon", not witnesses, numbers, witnesses)


def clear_caches() -> None:
    _MAXIMAL_CACHE.clear()
