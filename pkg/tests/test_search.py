from __future__ import annotations

from itertools import combinations

import pytest

from ekrkit.constructions import make_M_i, make_M_kj
from ekrkit.family import SetFamily, canonical_form, degrees, is_intersecting, is_star, is_subfamily_up_to_iso
from ekrkit.search import (
    BudgetExceeded,
    SearchConstraints,
    SearchTimeout,
    UnsupportedConstraints,
    build_instance,
    class_name,
    dmax_profile,
    enumerate_maximal,
    independence_number,
    max_family,
    nocommon_check,
    verify_claim36,
    verify_nocommon,
)
from ekrkit.search.linksearch import kk_table
from ekrkit.search.oracle import clear_caches, satisfies_constraints

from oracles import dmax_brute, intersecting_families_half, maximal_classes_brute


@pytest.mark.parametrize("n,k", [(4, 2), (5, 2), (6, 3), (7, 3)])
def test_maximal_classes_match_bron_kerbosch(n, k):
    assert set(enumerate_maximal(n, k, budget=100)) == maximal_classes_brute(n, k)


@pytest.mark.parametrize("n,k", [(6, 3), (7, 3)])
def test_dmax_profile_matches_brute_force(n, k):
    assert dict(dmax_profile(n, k)) == dmax_brute(n, k)


@pytest.mark.parametrize("n,k", [(5, 2), (6, 2), (7, 3), (8, 3)])
def test_unconstrained_optimum_is_the_star(n, k):
    inst = build_instance(n, k)
    res = max_family(inst)
    assert res.optimum == independence_number(inst)[0]
    assert res.classes == ["star"]


def half_optimum(k: int, constraints: SearchConstraints) -> tuple[int | None, set[SetFamily]]:
    best, wits = None, set()
    for F in intersecting_families_half(k):
        if not satisfies_constraints(F, constraints):
            continue
        if best is None or len(F) > best:
            best, wits = len(F), set()
        if len(F) == best:
            wits.add(canonical_form(F))
    return best, wits


@pytest.mark.parametrize("constraints", [
    SearchConstraints(forbid_trivial=True),
    SearchConstraints(max_degree_cap=5),
    SearchConstraints(max_degree_cap=7),
    SearchConstraints(forbid_trivial=True, max_degree_cap=6),
    SearchConstraints(fixed_f0=3),
])
def test_constrained_optimum_matches_exhaustive_n_2k(constraints):
    res = max_family(build_instance(6, 3), constraints)
    best, wits = half_optimum(3, constraints)
    assert res.optimum == best
    if constraints.fixed_f0 is None:
        assert set(res.witnesses) == wits


def test_templates_at_7_3():
    inst = build_instance(7, 3)
    templates = (make_M_i(7, 3, 3), make_M_i(7, 3, 4))
    res = max_family(inst, SearchConstraints(True, templates))
    assert res.optimum == 12
    for W in res.witnesses:
        assert is_intersecting(W) and not is_star(W)
        assert not any(is_subfamily_up_to_iso(W, T) for T in templates)


def test_witnesses_satisfy_constraints():
    c = SearchConstraints(forbid_trivial=True, max_degree_cap=8)
    res = max_family(build_instance(7, 3), c)
    assert res.witnesses
    for W in res.witnesses:
        assert satisfies_constraints(W, c)
        assert max(degrees(W)) <= 8


def test_runs_are_deterministic():
    c = SearchConstraints(forbid_trivial=True)
    clear_caches()
    a = max_family(build_instance(8, 3), c)
    clear_caches()
    b = max_family(build_instance(8, 3), c)
    assert a.to_json() == b.to_json()
    assert "elapsed" not in a.to_json()


def test_parallel_matches_serial(monkeypatch):
    c = SearchConstraints(forbid_trivial=True, forbidden_templates=(make_M_i(7, 3, 3), make_M_i(7, 3, 4)))
    clear_caches()
    serial = max_family(build_instance(7, 3), c).to_json()
    monkeypatch.setenv("EKRKIT_THREADS", "2")
    clear_caches()
    assert max_family(build_instance(7, 3), c).to_json() == serial


def test_timeout_reports_partial_bound():
    clear_caches()
    c = SearchConstraints(True, (make_M_i(9, 4, 5),))
    with pytest.raises(SearchTimeout) as err:
        max_family(build_instance(9, 4), c, timeout=0.0)
    assert err.value.upper_bound <= 56


def test_fixed_f0_combinations_are_rejected():
    with pytest.raises(UnsupportedConstraints):
        max_family(build_instance(7, 3), SearchConstraints(fixed_f0=2, max_degree_cap=9))


def test_budget():
    with pytest.raises(BudgetExceeded):
        build_instance(12, 6)
    with pytest.raises(BudgetExceeded):
        enumerate_maximal(8, 4)


def test_claim36_profile():
    report = verify_claim36(7, 3)
    assert report.passed
    assert report.numbers["profile"]["4"] == 9 == report.numbers["d_max(M_k)"]


def test_nocommon_at_7_3():
    report = verify_nocommon(7, 3)
    assert report.passed
    assert report.numbers["checked"] + report.numbers["skipped"] == report.numbers["families"]


def test_nocommon_has_no_k3_counterexample_even_without_maximality():
    # With p = 1 of maximum degree and F0 sharing an element q, every link avoiding q
    # is a 2-element vertex cover of the graph G0 = {B - {q} : B in F0}, and deg(1) >= deg(q)
    # forces #covers >= |G0| >= n - 2.  No graph on n - 2 vertices allows that.
    for n in (6, 7, 8):
        pairs = list(combinations(range(n - 2), 2))
        for m in range(n - 2, n + 1):
            for edges in combinations(pairs, m):
                covers = sum(1 for c in pairs if all(set(c) & set(e) for e in edges))
                assert covers < m


def test_nocommon_check_flags_common_element():
    # the k = 3 statement does not carry over to k = 4
    n = 9
    f0 = [[2, 3, 4, x] for x in range(5, 10)] + [[2, 3, 5, 6], [2, 3, 5, 7]]
    links = [c for c in combinations(range(2, 10), 3) if all(set(c) & set(b) for b in f0)]
    F = SetFamily.of(n, f0 + [[1, *c] for c in links])
    assert is_intersecting(F)
    out = nocommon_check(F, 4, unchecked=True)
    assert out == {"status": "fail", "x": 7, "p": 1, "common": [2, 3]}
    with pytest.raises(ValueError):
        nocommon_check(make_M_kj(7, 3, 3), 3)


def test_class_names():
    assert class_name(make_M_kj(7, 3, 1), 3) == "M_4=M_{3,1}"
    assert class_name(make_M_kj(9, 4, 3), 4) == "M_{4,3}"


def test_kruskal_katona_table_small():
    # 3 pairs of a 4-set cover at least 3 points
    assert kk_table(4, 2, 1, 3) == [0, 2, 3, 3]
