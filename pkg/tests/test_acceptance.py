"""Acceptance criteria 1 to 10, one PASS/FAIL line each in the terminal summary.

Run alone with ``pytest tests/test_acceptance.py``; the lines also print when
the full suite runs.  Criterion 4's (10, 4) stretch run uses the timeout in
EKRKIT_STRETCH_TIMEOUT (seconds, default 60) and reports "budget" on expiry.
"""

from __future__ import annotations

import os
import random
import time
from fractions import Fraction

import pytest

from ekrkit.constructions import (
    binom,
    claim35_trichotomy,
    claim41_gap,
    default_K2,
    m_i_maxdeg,
    m_i_size,
    make_M_i,
    make_M_kj,
    smallest_n,
    theorem_bound,
)
from ekrkit.family import canonical_form, is_maximal_intersecting
from ekrkit.framework import ARROWS, certificate_chain, decompose, level_t_certificate, verify_claim32
from ekrkit.polynomial import (
    IntersectionCondition,
    basis_dimension,
    evaluate,
    evaluate_raw,
    multilinear_reduce,
    poly_from_conditions,
)
from ekrkit.search import SearchTimeout, dmax_profile, enumerate_maximal, verify_frankl, verify_theorem

from oracles import eval_product

# criterion -> list of (part, passed, detail)
_PARTS: dict[int, list[tuple[str, bool, str]]] = {}


def record(criterion: int, part: str, passed: bool, detail: str = "") -> None:
    _PARTS.setdefault(criterion, []).append((part, passed, detail))


def summary_lines() -> list[str]:
    out = []
    for c in sorted(_PARTS):
        parts = _PARTS[c]
        ok = all(p for _, p, _ in parts)
        failed = [f"{name} ({detail})" if detail else name for name, p, detail in parts if not p]
        notes = [f"{name}: {detail}" for name, p, detail in parts if p and detail]
        tail = "; ".join(failed) if failed else "; ".join(notes)
        out.append(f"criterion {c}: {'PASS' if ok else 'FAIL'}" + (f" [{tail}]" if tail else ""))
    return out


def classes_of(report) -> set[str]:
    return set(report.numbers["witness_classes"])


def timed(fn, *args, **kwargs):
    start = time.monotonic()
    out = fn(*args, **kwargs)
    return out, time.monotonic() - start


# ---------------------------------------------------------------------------


def test_criterion_1_ekr():
    report, secs = timed(verify_theorem, 0, 7, 3)
    ok = report.numbers["optimum"] == 15 == binom(6, 2) and classes_of(report) == {"star"} and secs < 10
    record(1, "ekr (7,3)", ok, f"{secs:.1f}s")
    assert ok, report.to_json()


@pytest.mark.parametrize("n,k,value,classes", [
    (7, 3, 13, {"M_3=M_{3,4}", "M_4=M_{3,1}"}),
    (9, 4, binom(8, 3) - binom(4, 3) + 1, {"M_5=M_{4,1}"}),
])
def test_criterion_2_hilton_milner(n, k, value, classes):
    report, secs = timed(verify_theorem, 1, n, k)
    ok = report.passed and report.numbers["optimum"] == value and classes_of(report) == classes and secs < 300
    record(2, f"({n},{k})", ok, f"{secs:.1f}s")
    assert ok, report.to_json()


@pytest.mark.parametrize("n,k,value,classes", [
    (7, 3, 12, {"M_{3,2}"}),
    (9, 4, 51, {"M_{4,2}", "M_3", "M_4=M_{4,5}"}),
])
def test_criterion_3_level_two(n, k, value, classes):
    report, secs = timed(verify_theorem, 2, n, k)
    ok = report.passed and report.numbers["optimum"] == value and classes_of(report) == classes and secs < 600
    record(3, f"({n},{k})", ok, f"{secs:.1f}s")
    assert ok, report.to_json()


@pytest.fixture(scope="module")
def level3_94():
    return timed(verify_theorem, 3, 9, 4)


def test_criterion_4_level_three_optimum(level3_94):
    report, secs = level3_94
    ok = report.numbers["optimum"] == 50 and secs < 600
    record(4, "(9,4) optimum 50", ok, f"{secs:.1f}s")
    assert ok, report.to_json()


def test_criterion_4_level_three_classes(level3_94):
    report, _ = level3_94
    found = classes_of(report)
    expected = {"K_2", "M_{4,3}"}
    record(4, "(9,4) classes {K_2, M_{4,3}}", found == expected, f"found {sorted(found)}")
    assert found == expected, report.to_json()


def test_criterion_4_stretch_10_4():
    limit = float(os.environ.get("EKRKIT_STRETCH_TIMEOUT", "60"))
    try:
        report = verify_theorem(3, 10, 4, timeout=limit)
    except SearchTimeout as exc:
        record(4, "(10,4) stretch", True, f"budget after {limit:g}s, optimum <= {exc.upper_bound}")
        return
    ok = report.numbers["optimum"] == 68 and classes_of(report) == {"M_{4,3}"}
    record(4, "(10,4) stretch", ok, f"classes {report.numbers['witness_classes']}")
    assert ok, report.to_json()


@pytest.mark.parametrize("n,k,i", [(7, 3, 3), (7, 3, 4), (9, 4, 3), (9, 4, 4), (9, 4, 5)])
def test_criterion_5_frankl(n, k, i):
    report = verify_frankl(n, k, i)
    ok = report.passed and report.numbers["optimum"] == m_i_size(n, k, i)
    if i == 4:
        ok = ok and len(report.numbers["witness_classes"]) == 2
    record(5, f"({n},{k},i={i})", ok)
    assert ok, report.to_json()


SWEEP = [(k, t) for k in (6, 7, 8) for t in range(4, k - 1)]


@pytest.mark.parametrize("k,t", SWEEP)
def test_criterion_6_level_t_properties(k, t):
    n = smallest_n(t, k)
    fam = make_M_kj(n, k, t)
    bound = theorem_bound(t, n, k).value
    size_ok = len(fam) == bound
    gap_ok = claim41_gap(n, k, t) > 0
    cert = level_t_certificate(fam, t, k)
    ok = size_ok and gap_ok and cert.passed
    part = "(b) " if k == t + 2 else ""
    record(6, f"{part}(a,c,d) k={k} t={t} n={n}", ok)
    assert ok, (size_ok, gap_ok, cert.to_json())


def test_criterion_6e_claim35_trichotomy():
    bad = []
    count = 0
    for k in range(3, 13):
        for n in range(2 * k + 1, 41):
            for t in range(1, n - k + 1):
                count += 1
                if not claim35_trichotomy(t, n, k).passed:
                    bad.append((t, n, k))
    record(6, "(e) claim35 sweep", not bad, f"{count} cases" if not bad else f"failures {bad[:5]}")
    assert not bad


CONSTRUCTED = [(7, 3), (8, 3), (9, 4), (11, 5)]


def _certify(F, k) -> list[str]:
    """Names of failed checks for one family; non-maximal ones skip maximality but keep claim32."""
    maximal = is_maximal_intersecting(F, k)
    d, reports = certificate_chain(F, k, unchecked=not maximal)
    if not maximal:
        reports.append(verify_claim32(d))
    failed = [r.claim_id for r in reports if not r.passed]
    c31 = reports[0]
    if set(c31.numbers["cases"]) != set(ARROWS) or not all(c31.numbers["cases"].values()):
        failed.append("arrows")
    lem = reports[1]
    if basis_dimension(d.n, d.k - 1) <= 400 and lem.numbers.get("rank") != lem.numbers["rows"]:
        failed.append("rank")
    return failed


def test_criterion_7_framework_corpus():
    start = time.monotonic()
    problems = []
    corpus = [(F, 3, "enumerated") for F in enumerate_maximal(7, 3)]
    for n, k in CONSTRUCTED:
        named = [make_M_i(n, k, i) for i in range(3, k + 2)]
        named += [make_M_kj(n, k, j) for j in range(1, n - k + 1)]
        named.append(default_K2(n, k))
        corpus += [(F, k, f"({n},{k})") for F in named]
    for F, k, tag in corpus:
        failed = _certify(F, k)
        if failed:
            problems.append((tag, len(F), failed))
    secs = time.monotonic() - start
    ok = not problems and secs < 900
    record(7, f"{len(corpus)} families", ok, f"{secs:.1f}s" if ok else str(problems[:3]))
    assert ok, problems


def test_criterion_8_claim36():
    (profile, secs) = timed(dmax_profile, 7, 3)
    values = [d for _, d in profile]
    mono = all(a >= b for a, b in zip(values, values[1:]))
    d4 = dict(profile).get(4)
    ok = mono and d4 == 9 == m_i_maxdeg(7, 3, 3) and secs < 600
    record(8, "dmax_profile(7,3)", ok, f"profile {values}")
    assert ok


def test_criterion_9_polynomial_oracle():
    rng = random.Random(20240917)
    mismatches = 0
    for _ in range(1000):
        n = rng.randint(1, 9)
        conds = [IntersectionCondition.of(rng.sample(range(1, n + 1), rng.randint(0, n)), rng.randint(0, n))
                 for _ in range(rng.randint(1, 4))]
        x = rng.getrandbits(n) << 1
        if evaluate(poly_from_conditions(conds, n), x) != eval_product(conds, x):
            mismatches += 1
    for _ in range(1000):
        n = rng.randint(1, 8)
        raw = {}
        for _ in range(rng.randint(1, 6)):
            mono = tuple((rng.randint(1, n), rng.randint(0, 4)) for _ in range(rng.randint(0, 3)))
            raw[mono] = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        x = rng.getrandbits(n) << 1
        if evaluate(multilinear_reduce(raw, n), x) != evaluate_raw(raw, x):
            mismatches += 1
    record(9, "2000 exact trials", mismatches == 0, f"{mismatches} mismatches" if mismatches else "")
    assert mismatches == 0


def test_criterion_10_construction_identities():
    bad = []
    for k in range(3, 9):
        for n in (2 * k + 1, 2 * k + 3):
            if make_M_kj(n, k, n - k) != make_M_i(n, k, k):
                bad.append(("M_{k,n-k}", n, k))
            if make_M_kj(n, k, 1) != make_M_i(n, k, k + 1):
                bad.append(("M_{k,1}", n, k))
            for i in range(3, k + 2):
                if len(make_M_i(n, k, i)) != m_i_size(n, k, i):
                    bad.append(("size", n, k, i))
            if m_i_size(n, k, 3) != m_i_size(n, k, 4):
                bad.append(("M3=M4", n, k))
    record(10, "3 <= k <= 8", not bad, str(bad[:3]) if bad else "")
    assert not bad
