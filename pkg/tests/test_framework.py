from __future__ import annotations

from itertools import combinations
from math import comb

import pytest

from ekrkit.constructions import RegimeError, default_K2, make_M_i, make_M_kj, make_star
from ekrkit.family import FamilyError, SetFamily, shadow, sunflower_core
from ekrkit.framework import (
    ARROWS,
    NotIntersecting,
    NotMaximal,
    Trivial,
    build_condition_system,
    certificate_chain,
    compute_c_partition,
    decompose,
    f1_bound_certificate,
    level_t_certificate,
    verify_claim31,
    verify_claim32,
    verify_claim33,
    verify_claim34,
)
from ekrkit.polynomial import ConditionSystem, lemma22_certificate, triangular_check
from ekrkit.search import enumerate_maximal


def s_by_definition(F: SetFamily, k: int, p: int) -> set[frozenset[int]]:
    sets = [set(b) for b in F.sets()]
    f0 = [b for b in sets if p not in b]
    links = {frozenset(b - {p}) for b in sets if p in b}
    rest = [e for e in range(1, F.n + 1) if e != p]
    return {frozenset(c) for c in combinations(rest, k - 1)
            if frozenset(c) not in links and any(not set(c) & b for b in f0)}


def test_decompose_m_k2():
    d = decompose(make_M_kj(7, 3, 2), 3)
    assert (d.p, d.x) == (1, 2)
    assert len(d.H) == len(d.G) == 1 + 6 == 7
    assert len(d.F0) + len(d.F1) == len(d.F) == 12
    assert {frozenset(s) for s in d.S.sets()} == s_by_definition(d.F, 3, 1)


def test_h_and_g_sizes():
    d = decompose(make_M_i(7, 3, 3), 3)
    assert len(d.H) == len(d.G) == sum(comb(6, i) for i in range(2))
    assert all(b.bit_count() <= 1 and not b >> d.p & 1 for b in d.H.blocks)
    assert all(b >> d.p & 1 and 1 <= b.bit_count() <= 2 for b in d.G.blocks)


def test_decompose_errors():
    with pytest.raises(NotIntersecting) as err:
        decompose(SetFamily.of(7, [[1, 2, 3], [4, 5, 6]]), 3)
    assert err.value.witness == [[1, 2, 3], [4, 5, 6]]
    with pytest.raises(Trivial):
        decompose(make_star(7, 3, 1), 3)
    with pytest.raises(NotMaximal) as err:
        decompose(make_M_kj(7, 3, 3), 3)
    assert len(err.value.witness) == 3
    with pytest.raises(RegimeError):
        decompose(SetFamily.of(6, [[1, 2, 3], [1, 4, 5], [2, 4, 6]]), 3)


def test_s_avoids_shadow_and_p():
    for F in (make_M_i(9, 4, 3), make_M_kj(9, 4, 2), default_K2(9, 4)):
        d = decompose(F, 4)
        links = {b ^ (1 << d.p) for b in d.F1.blocks}
        assert not links & d.S.block_set
        assert all(not s >> d.p & 1 for s in d.S.blocks)
        assert {frozenset(s) for s in d.S.sets()} == s_by_definition(F, 4, d.p)


def test_condition_system_shape():
    d = decompose(make_M_kj(7, 3, 2), 3)
    sys_ = build_condition_system(d)
    assert len(sys_) == len(d.H) + len(d.F1) + len(d.G) + len(d.S)
    labels = [r.label.split(":")[0] for r in sys_.rows]
    assert labels == sorted(labels, key=["H", "F1", "G", "S"].index)
    empty = sys_.rows[0]
    assert empty.label == "H:" and empty.witness == 0
    assert ConditionSystem.from_json(sys_.to_json()) == sys_
    cert = lemma22_certificate(sys_)
    assert cert.passed and cert.numbers["bound"] == 29


@pytest.mark.parametrize("F,k", [(make_M_kj(7, 3, 2), 3), (make_M_i(9, 4, 4), 4), (default_K2(9, 4), 4)])
def test_claim31_agrees_with_triangular_check(F, k):
    d = decompose(F, k)
    pair = verify_claim31(d, mode="pairwise")
    index = verify_claim31(d, mode="index")
    assert pair.passed and index.passed
    assert set(pair.numbers["cases"]) == set(ARROWS)
    assert triangular_check(build_condition_system(d)).passed == pair.passed


def test_reversed_h_order_breaks_claim31():
    d = decompose(make_M_kj(7, 3, 2), 3)
    sys_ = build_condition_system(d)
    h = [r for r in sys_.rows if r.label.startswith("H:")]
    rest = [r for r in sys_.rows if not r.label.startswith("H:")]
    mutated = ConditionSystem(sys_.n, sys_.s, tuple(reversed(h)) + tuple(rest))
    report = verify_claim31(d, system=mutated)
    assert not report.passed
    assert report.numbers["cases"]["H->H"] is False
    assert report.witnesses[0]["arrow"] == "H->H"
    assert not triangular_check(mutated).passed


def test_dropping_total_condition_keeps_claim31():
    # the ([n], n-k-1) condition only matters for H-sets of size n-k-1, which exceed k-2 here
    d = decompose(make_M_kj(7, 3, 2), 3)
    report = verify_claim31(d, system=build_condition_system(d, include_total=False))
    assert report.passed


def test_f1_bound():
    d = decompose(make_M_kj(7, 3, 2), 3)
    c31 = verify_claim31(d)
    cert = f1_bound_certificate(d, c31)
    assert cert.passed
    assert cert.numbers["|F1|"] == 10 and cert.numbers["d_max"] == 10
    assert cert.numbers["family_bound"] >= 12


def test_hilton_milner_case_x_equals_one():
    d = decompose(make_M_i(9, 4, 5), 4)
    assert d.x == 1
    assert len(d.S) >= comb(9 - 4 - 1, 3)


def test_claim32_on_constructions():
    assert verify_claim32(decompose(make_M_kj(7, 3, 2), 3)).passed
    assert verify_claim32(decompose(make_M_i(11, 5, 5), 5)).passed


def test_claim32_holds_for_non_maximal_families():
    # a block avoiding p is never disjoint from a link, so the union description survives
    for n, k, j in [(7, 3, 3), (8, 3, 3), (8, 3, 4), (9, 4, 4)]:
        d = decompose(make_M_kj(n, k, j), k, unchecked=True)
        assert verify_claim32(d).passed
    F = SetFamily.of(7, [[1, 2, 3], [1, 2, 4], [2, 3, 4], [1, 3, 5]])
    d = decompose(F, 3, unchecked=True)
    assert verify_claim32(d).passed


def test_c_partition_on_sunflower():
    n, k, t = 9, 4, 3
    d = decompose(make_M_kj(n, k, t), k)
    assert sunflower_core(d.F0) is not None
    sizes = compute_c_partition(d).sizes()
    assert sizes == [comb(n - k - l, k - l) for l in range(1, t + 1)]
    assert verify_claim33(d).passed
    report = verify_claim34(d)
    assert report.passed and report.numbers["sunflower_k-1"]
    assert len(d.S) == report.numbers["sum"]


def test_claim34_strict_when_not_sunflower():
    d = decompose(default_K2(9, 4), 4)
    report = verify_claim34(d)
    assert report.passed and not report.numbers["sunflower_k-1"]
    assert len(d.S) >= report.numbers["strengthened"]
    a, b = d.F0.blocks[:2]
    if (a & b).bit_count() <= 2:
        assert compute_c_partition(d).sizes()[1] >= comb(3, 2) + comb(2, 2)


def test_claim34_outside_range_is_not_applicable():
    F = SetFamily.of(7, [[1, 2, 3], [1, 2, 4], [1, 3, 5], [1, 4, 6], [1, 5, 6],
                         [2, 3, 6], [2, 4, 5], [2, 5, 6], [3, 4, 5], [3, 4, 6]])
    d = decompose(F, 3)
    assert d.x == 5 > 7 - 3
    report = verify_claim34(d)
    assert report.passed and report.notes


@pytest.fixture(scope="module")
def corpus_73() -> list[SetFamily]:
    return enumerate_maximal(7, 3)


def test_certificate_chain_on_every_maximal_family(corpus_73):
    assert len(corpus_73) == 14
    for F in corpus_73:
        d, reports = certificate_chain(F, 3)
        assert [r.claim_id for r in reports] == ["claim31", "lemma22", "lemma22", "claim32", "claim33", "claim34"]
        assert all(reports), [r.to_json() for r in reports if not r]
        part = compute_c_partition(d)
        union = set().union(*(c.block_set for c in part.cells))
        assert union == d.S.block_set and sum(part.sizes()) == len(d.S)


def test_claim34_biconditional_on_corpus(corpus_73):
    seen = set()
    for F in corpus_73:
        d = decompose(F, 3)
        report = verify_claim34(d)
        if report.numbers["in_range"]:
            equal = len(d.S) == report.numbers["sum"]
            assert equal == report.numbers["sunflower_k-1"]
            seen.add(equal)
    assert seen == {True, False}


def test_level_certificate_flags_oracle_case():
    report = level_t_certificate(make_M_kj(7, 3, 2), 2)
    assert report.passed
    assert report.numbers["chain_bound"] == 13 and report.numbers["theorem_bound"] == 12
    assert report.numbers["oracle_required"] and report.notes


def test_level_certificate_preconditions():
    with pytest.raises(FamilyError):
        level_t_certificate(make_M_i(9, 4, 5), 2)


def test_level_certificate_at_the_bound():
    report = level_t_certificate(default_K2(11, 5), 3)
    assert report.passed
    assert report.numbers["|F|"] == report.numbers["theorem_bound"]
