"""Named intersecting families and the closed-form counts and bounds around them."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb, isqrt
from typing import Any

from .family import FamilyError, SetFamily, elements_of, mask_of
from .report import VerificationReport


class ParameterRangeError(FamilyError):
    """A construction or formula parameter is out of range; ``constraint`` names which."""

    def __init__(self, constraint: str, detail: str = "") -> None:
        self.constraint = constraint
        super().__init__(f"violated constraint {constraint}" + (f": {detail}" if detail else ""))


class RegimeError(ValueError):
    """(n, k, t) lies outside the hypothesis of the requested bound."""

    def __init__(self, inequality: str, detail: str = "") -> None:
        self.inequality = inequality
        super().__init__(f"regime violated: {inequality}" + (f" ({detail})" if detail else ""))


def binom(a: int, b: int) -> int:
    """Binomial coefficient with binom(a, b) = 0 whenever a < b or b < 0."""
    if b < 0 or a < b or a < 0:
        return 0
    return comb(a, b)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def _require(cond: bool, constraint: str, detail: str = "") -> None:
    if not cond:
        raise ParameterRangeError(constraint, detail)


def _require_kneser_range(n: int, k: int) -> None:
    _require(k >= 2, "k >= 2", f"k={k}")
    _require(n >= 2 * k + 1, "n >= 2k+1", f"n={n}, k={k}")


def _bits(elements) -> int:
    return mask_of(elements)


def _combos(ground: list[int], r: int) -> list[int]:
    if r < 0 or r > len(ground):
        return []
    bit = [1 << e for e in ground]
    idx = range(len(ground))
    return [sum(bit[i] for i in c) for c in combinations(idx, r)]


def make_star(n: int, k: int, p: int) -> SetFamily:
    """All k-subsets of [n] containing ``p``."""
    _require(1 <= k <= n, "1 <= k <= n", f"n={n}, k={k}")
    _require(1 <= p <= n, "1 <= p <= n", f"p={p}")
    rest = [e for e in range(1, n + 1) if e != p]
    return SetFamily(n, tuple(c | 1 << p for c in _combos(rest, k - 1)))


def make_M_i(n: int, k: int, i: int) -> SetFamily:
    """Sets through 1 meeting [2, i], plus sets avoiding 1 that contain [2, i]."""
    _require_kneser_range(n, k)
    _require(3 <= i <= k + 1, "3 <= i <= k+1", f"i={i}, k={k}")
    spread = _bits(range(2, i + 1))
    rest = list(range(2, n + 1))
    blocks = [c | 2 for c in _combos(rest, k - 1) if c & spread]
    outside = list(range(i + 1, n + 1))
    blocks += [spread | c for c in _combos(outside, k - (i - 1))]
    return SetFamily(n, tuple(blocks))


def make_M_kj(n: int, k: int, j: int) -> SetFamily:
    """The level-j family: a star on 1 trimmed by [2, k] and the block [k+1, k+j]."""
    _require_kneser_range(n, k)
    _require(k >= 3, "k >= 3", f"k={k}")
    _require(1 <= j <= n - k, "1 <= j <= n-k", f"j={j}, n-k={n - k}")
    core = _bits(range(2, k + 1))
    tail = _bits(range(k + 1, k + j + 1))
    rest = list(range(2, n + 1))
    blocks = [c | 2 for c in _combos(rest, k - 1) if c & core]
    beyond = list(range(k + j + 1, n + 1))
    blocks += [2 | tail | c for c in _combos(beyond, k - 1 - j)]
    blocks += [core | 1 << y for y in range(k + 1, k + j + 1)]
    return SetFamily(n, tuple(blocks))


def make_K(n: int, k: int, E1, E2, x0: int) -> SetFamily:
    """Sets through ``x0`` meeting both ``E1`` and ``E2``, together with ``E1`` and ``E2``.

    ``E1`` and ``E2`` may share any number of elements from 1 to k-1.
    """
    _require_kneser_range(n, k)
    e1, e2 = _bits(E1), _bits(E2)
    universe = _bits(range(1, n + 1))
    _require(not (e1 | e2) & ~universe, "E1, E2 subsets of [n]")
    _require(e1.bit_count() == k and e2.bit_count() == k, "|E1| = |E2| = k")
    _require(e1 != e2, "E1 != E2")
    _require(e1 & e2 != 0, "E1 ∩ E2 nonempty")
    _require(1 <= x0 <= n, "1 <= x0 <= n", f"x0={x0}")
    _require(not (e1 | e2) >> x0 & 1, "x0 not in E1 ∪ E2", f"x0={x0}")
    rest = [e for e in range(1, n + 1) if e != x0]
    blocks = [c | 1 << x0 for c in _combos(rest, k - 1) if c & e1 and c & e2]
    blocks += [e1, e2]
    return SetFamily(n, tuple(blocks))


def make_K2(n: int, k: int, E1, E2, x0: int) -> SetFamily:
    """``make_K`` restricted to |E1 ∩ E2| = k-2."""
    e1, e2 = _bits(E1), _bits(E2)
    _require((e1 & e2).bit_count() == k - 2, "|E1 ∩ E2| = k-2", f"got {(e1 & e2).bit_count()}")
    return make_K(n, k, E1, E2, x0)


def default_K(n: int, k: int, s: int) -> SetFamily:
    """K(E1, E2, x0) with E1 = [1, k], E2 = [1, s] + [k+1, 2k-s], x0 = 2k-s+1."""
    _require(1 <= s <= k - 1, "1 <= s <= k-1", f"s={s}")
    _require(2 * k - s + 1 <= n, "2k-s+1 <= n", f"n={n}")
    e1 = list(range(1, k + 1))
    e2 = list(range(1, s + 1)) + list(range(k + 1, 2 * k - s + 1))
    return make_K(n, k, e1, e2, 2 * k - s + 1)


def default_K2(n: int, k: int) -> SetFamily:
    """K(E1, E2, x0) with E1 = [1, k], E2 = [1, k-2] + {k+1, k+2}, x0 = k+3."""
    e1 = list(range(1, k + 1))
    e2 = list(range(1, k - 1)) + [k + 1, k + 2]
    return make_K2(n, k, e1, e2, k + 3)


KINDS = ("star", "m_i", "m_kj", "k2")


@dataclass(frozen=True)
class NamedFamilySpec:
    """Recipe for one named family; ``parameters`` holds p, i, j or (E1, E2, x0)."""

    kind: str
    n: int
    k: int
    parameters: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ParameterRangeError("kind in {star, m_i, m_kj, k2}", self.kind)

    def build(self) -> SetFamily:
        p = self.parameters
        if self.kind == "star":
            return make_star(self.n, self.k, p.get("p", 1))
        if self.kind == "m_i":
            return make_M_i(self.n, self.k, p["i"])
        if self.kind == "m_kj":
            return make_M_kj(self.n, self.k, p["j"])
        if "E1" in p:
            return make_K2(self.n, self.k, p["E1"], p["E2"], p["x0"])
        return default_K2(self.n, self.k)

    def label(self) -> str:
        p = self.parameters
        if self.kind == "star":
            return "star"
        if self.kind == "m_i":
            return f"M_{p['i']}"
        if self.kind == "m_kj":
            return f"M_{{{self.k},{p['j']}}}"
        return "K_2"


# ---------------------------------------------------------------------------
# sizes and bounds
# ---------------------------------------------------------------------------


def _require_i(n: int, k: int, i: int) -> None:
    _require(3 <= i <= k + 1, "3 <= i <= k+1", f"i={i}, k={k}")
    _require(n >= 2 * k + 1, "n >= 2k+1", f"n={n}, k={k}")


def m_i_size(n: int, k: int, i: int) -> int:
    _require_i(n, k, i)
    return sum(binom(n - j, k - 2) for j in range(2, i + 1)) + binom(n - i, k - i + 1)


def m_i_maxdeg(n: int, k: int, i: int) -> int:
    _require_i(n, k, i)
    return sum(binom(n - j, k - 2) for j in range(2, i + 1))


@dataclass(frozen=True)
class BoundTable:
    level: int
    n: int
    k: int
    value: int
    formula_id: str

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError("bound values are non-negative")

    def to_json(self) -> dict[str, Any]:
        return {"level": self.level, "n": self.n, "k": self.k, "value": self.value, "formula_id": self.formula_id}


def above_golden_threshold(n: int, k: int) -> bool:
    """Exact test of n > ((5 + sqrt 5) k - 7) / 2."""
    lhs = 2 * n + 7 - 5 * k
    return lhs > 0 and lhs * lhs > 5 * k * k


def golden_threshold_floor(k: int) -> int:
    """The largest integer n with n <= ((5 + sqrt 5) k - 7) / 2."""
    return (5 * k + isqrt(5 * k * k) - 7) // 2


def level3_regime(n: int, k: int) -> int:
    return 1 if n <= 3 * k - 3 else 2


def theorem_bound(t: int, n: int, k: int) -> BoundTable:
    """Maximum size of an intersecting family at stability level ``t``."""
    if t < 0:
        raise RegimeError("t >= 0", f"t={t}")
    if k < 1:
        raise RegimeError("k >= 1", f"k={k}")
    top = binom(n - 1, k - 1)
    if t == 0:
        if n < 2 * k:
            raise RegimeError("n >= 2k", f"n={n}, k={k}")
        return BoundTable(0, n, k, top, "ekr")
    if n < 2 * k + 1:
        raise RegimeError("n >= 2k+1", f"n={n}, k={k}")
    if t == 1:
        if k < 2:
            raise RegimeError("k >= 2", f"k={k}")
        return BoundTable(1, n, k, top - binom(n - k - 1, k - 1) + 1, "hilton-milner")
    if t == 2:
        if k < 3:
            raise RegimeError("k >= 3", f"k={k}")
        value = top - binom(n - k - 1, k - 1) - binom(n - k - 2, k - 2) + 2
        return BoundTable(2, n, k, value, "level2")
    if t == 3:
        if k < 4:
            raise RegimeError("k >= 4", f"k={k}")
        if level3_regime(n, k) == 1:
            value = top - 2 * binom(n - k - 1, k - 1) + binom(n - k - 3, k - 1) + 2
            return BoundTable(3, n, k, value, "level3-regime1")
        value = top - binom(n - k - 1, k - 1) - binom(n - k - 2, k - 2) - binom(n - k - 3, k - 3) + 3
        return BoundTable(3, n, k, value, "level3-regime2")
    if k < t + 2:
        raise RegimeError("k >= t+2", f"k={k}, t={t}")
    if not above_golden_threshold(n, k):
        raise RegimeError("n > ((5+sqrt5)k-7)/2", f"n={n}, k={k}")
    value = top - sum(binom(n - k - j, k - j) for j in range(1, t + 1)) + t
    return BoundTable(t, n, k, value, "level-t")


def smallest_n(t: int, k: int) -> int:
    """Smallest n satisfying the hypothesis of the level-t bound."""
    if t == 0:
        return 2 * k
    if t <= 3:
        return 2 * k + 1
    return max(2 * k + 1, golden_threshold_floor(k) + 1)


# ---------------------------------------------------------------------------
# g, f, h
# ---------------------------------------------------------------------------


def _require_x(x: int, n: int, k: int, name: str = "x") -> None:
    if not 1 <= x <= n - k:
        raise ParameterRangeError(f"1 <= {name} <= n-k", f"{name}={x}, n-k={n - k}")


def g_func(x: int, n: int, k: int) -> int:
    _require_x(x, n, k)
    return sum(binom(n - k - j, k - j) for j in range(1, min(x, k) + 1))


def f_func(x: int, n: int, k: int) -> int:
    return g_func(x, n, k) - x


def h_func(t: int, n: int, k: int) -> int:
    _require_x(t, n, k, "t")
    return min(f_func(x, n, k) for x in range(t, n - k + 1))


def claim35_case(t: int, k: int) -> str:
    if k >= t + 3:
        return "k >= t+3"
    if k == t + 2:
        return "k = t+2"
    return "k <= t+1"


def claim35_trichotomy(t: int, n: int, k: int) -> VerificationReport:
    """Locate the minimisers of f on [t, n-k] and compare with the predicted ones."""
    _require_x(t, n, k, "t")
    if n < 2 * k + 1:
        raise RegimeError("n >= 2k+1", f"n={n}, k={k}")
    xs = range(t, n - k + 1)
    values = {x: f_func(x, n, k) for x in xs}
    case = claim35_case(t, k)
    if case == "k >= t+3":
        predicted = {t}
    elif case == "k = t+2":
        predicted = {t, n - k}
    else:
        predicted = {n - k}
    low = min(values.values())
    minimisers = {x for x, v in values.items() if v == low}
    passed = minimisers == predicted
    numbers = {"t": t, "n": n, "k": k, "h": low, "case": case,
               "minimisers": sorted(minimisers), "predicted": sorted(predicted)}
    witnesses = [] if passed else [{"f": {str(x): v for x, v in values.items()}}]
    return VerificationReport("claim35", passed, numbers, witnesses)


def claim41_gap(n: int, k: int, t: int) -> int:
    if t < 4:
        raise ParameterRangeError("t >= 4", f"t={t}")
    if k < t + 2:
        raise ParameterRangeError("k >= t+2", f"k={k}, t={t}")
    return binom(n - k - 3, k - 2) - 2 - (binom(n - k - 2, k - 3) - t)


def family_label_table(n: int, k: int) -> list[NamedFamilySpec]:
    """Every named family that is defined at (n, k): M_i, M_{k,j} and K_2."""
    specs = [NamedFamilySpec("m_i", n, k, {"i": i}) for i in range(3, k + 2)]
    specs += [NamedFamilySpec("m_kj", n, k, {"j": j}) for j in range(1, n - k + 1)]
    specs.append(NamedFamilySpec("k2", n, k))
    return specs


def describe(spec: NamedFamilySpec) -> str:
    return f"{spec.label()} at (n,k)=({spec.n},{spec.k})"


__all__ = [
    "BoundTable",
    "NamedFamilySpec",
    "ParameterRangeError",
    "RegimeError",
    "binom",
    "claim35_trichotomy",
    "claim41_gap",
    "default_K2",
    "elements_of",
    "f_func",
    "g_func",
    "h_func",
    "m_i_maxdeg",
    "m_i_size",
    "make_K2",
    "make_M_i",
    "make_M_kj",
    "make_star",
    "smallest_n",
    "theorem_bound",
]
