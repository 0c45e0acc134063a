"""Intersection-condition systems and exact multilinear polynomials over the rationals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm
from typing import Any, Iterable, Mapping, Sequence

from .family import ElementSet, elements_of, full_mask, mask_of
from .report import VerificationReport

Rational = Fraction


@dataclass(frozen=True)
class IntersectionCondition:
    """The predicate ``|X ∩ P| = beta``; ``P`` is a bitmask over elements 1..n."""

    P: int
    beta: int

    def __post_init__(self) -> None:
        if self.P < 0 or self.P & 1:
            raise ValueError("P must be a subset of {1, 2, ...}")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")

    @classmethod
    def of(cls, elements: Iterable[int], beta: int) -> IntersectionCondition:
        return cls(mask_of(elements), beta)

    def to_json(self) -> dict[str, Any]:
        return {"P": elements_of(self.P), "beta": self.beta}


def _mask(X: ElementSet | int) -> int:
    return X.mask if isinstance(X, ElementSet) else X


def satisfies(X: ElementSet | int, c: IntersectionCondition) -> bool:
    return (_mask(X) & c.P).bit_count() == c.beta


@dataclass(frozen=True)
class Row:
    label: str
    witness: int
    conds: tuple[IntersectionCondition, ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "witness": elements_of(self.witness),
            "conds": [c.to_json() for c in self.conds],
        }


@dataclass(frozen=True)
class ConditionSystem:
    """Ordered rows (label, witness X_i, conditions R_i), each with exactly ``s`` conditions."""

    n: int
    s: int
    rows: tuple[Row, ...]

    def __post_init__(self) -> None:
        universe = full_mask(self.n)
        labels = set()
        for row in self.rows:
            if len(row.conds) != self.s:
                raise ValueError(f"row {row.label} has {len(row.conds)} conditions, expected {self.s}")
            if row.label in labels:
                raise ValueError(f"duplicate row label {row.label}")
            labels.add(row.label)
            if row.witness & ~universe or any(c.P & ~universe or c.beta > self.n for c in row.conds):
                raise ValueError(f"row {row.label} leaves the ground set [{self.n}]")

    def __len__(self) -> int:
        return len(self.rows)

    def polys(self) -> list[MultilinearPoly]:
        return [poly_from_conditions(row.conds, self.n) for row in self.rows]

    def to_json(self) -> dict[str, Any]:
        return {"n": self.n, "s": self.s, "rows": [r.to_json() for r in self.rows]}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> ConditionSystem:
        rows = tuple(
            Row(
                str(r["label"]),
                mask_of(r["witness"]),
                tuple(IntersectionCondition.of(c["P"], int(c["beta"])) for c in r["conds"]),
            )
            for r in data["rows"]
        )
        return cls(int(data["n"]), int(data["s"]), rows)


def pad_conditions(conds: Sequence[IntersectionCondition], s: int) -> tuple[IntersectionCondition, ...]:
    """Repeat the first condition until there are exactly ``s``."""
    if not conds:
        raise ValueError("cannot pad an empty condition list")
    if len(conds) > s:
        raise ValueError(f"{len(conds)} conditions exceed the row width {s}")
    return tuple(conds) + (conds[0],) * (s - len(conds))


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultilinearPoly:
    """Sum of ``coef * prod_{e in mono} x_e`` with monomials as bitmasks and no zero coefficients."""

    n: int
    terms: Mapping[int, Fraction]

    def __post_init__(self) -> None:
        clean = {m: Fraction(c) for m, c in self.terms.items() if c != 0}
        object.__setattr__(self, "terms", clean)

    @property
    def degree(self) -> int:
        return max((m.bit_count() for m in self.terms), default=0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultilinearPoly):
            return NotImplemented
        return self.n == other.n and dict(self.terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=graded_lex_key):
            mono = "*".join(f"x{e}" for e in elements_of(m)) or "1"
            parts.append(f"{self.terms[m]}*{mono}")
        return " + ".join(parts)


# A raw polynomial maps exponent vectors, given as tuples of (variable, exponent)
# pairs, to coefficients.  Exponents above 1 are what multilinear_reduce removes.
RawPoly = Mapping[tuple[tuple[int, int], ...], Any]


def multilinear_reduce(p: RawPoly, n: int) -> MultilinearPoly:
    out: dict[int, Fraction] = {}
    for mono, coef in p.items():
        m = 0
        for var, exp in mono:
            if exp > 0:
                m |= 1 << var
        out[m] = out.get(m, Fraction(0)) + Fraction(coef)
    return MultilinearPoly(n, out)


def evaluate_raw(p: RawPoly, X: ElementSet | int) -> Fraction:
    x = _mask(X)
    total = Fraction(0)
    for mono, coef in p.items():
        if all(exp == 0 or x >> var & 1 for var, exp in mono):
            total += Fraction(coef)
    return total


def _mul_linear(terms: dict[int, Fraction], P: int, beta: int) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    vars_ = [1 << e for e in elements_of(P)]
    for m, c in terms.items():
        for v in vars_:
            key = m | v
            out[key] = out.get(key, 0) + c
        if beta:
            out[m] = out.get(m, 0) - beta * c
    return {m: c for m, c in out.items() if c}


def poly_from_conditions(R: Sequence[IntersectionCondition], n: int) -> MultilinearPoly:
    """Expand the product of ``(sum_{b in P} x_b - beta)`` and reduce to multilinear form.

    Reducing after each factor gives the same result as reducing at the end,
    because ``x^2 -> x`` is a ring map on polynomials restricted to 0/1 points.
    """
    if not R:
        raise ValueError("need at least one condition")
    terms: dict[int, Fraction] = {0: Fraction(1)}
    for c in R:
        terms = _mul_linear(terms, c.P, c.beta)
    return MultilinearPoly(n, terms)


def evaluate(f: MultilinearPoly, X: ElementSet | int) -> Fraction:
    x = _mask(X)
    return sum((c for m, c in f.terms.items() if m & x == m), Fraction(0))


def graded_lex_key(mono: int) -> tuple[int, list[int]]:
    return (mono.bit_count(), elements_of(mono))


def basis_dimension(n: int, s: int) -> int:
    return sum(comb(n, h) for h in range(s + 1))


def exact_rank(polys: Sequence[MultilinearPoly]) -> int:
    """Rank of the coefficient matrix, by fraction-free (Bareiss) elimination over the integers."""
    if not polys:
        return 0
    monos = sorted({m for f in polys for m in f.terms}, key=graded_lex_key)
    col = {m: i for i, m in enumerate(monos)}
    rows: list[list[int]] = []
    for f in polys:
        scale = lcm(*(c.denominator for c in f.terms.values())) if f.terms else 1
        row = [0] * len(monos)
        for m, c in f.terms.items():
            row[col[m]] = int(c * scale)
        rows.append(row)
    return _bareiss_rank(rows, len(monos))


def _bareiss_rank(rows: list[list[int]], width: int) -> int:
    rank = 0
    prev = 1
    for c in range(width):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][c]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        top = rows[rank]
        a = top[c]
        for r in range(rank + 1, len(rows)):
            row = rows[r]
            b = row[c]
            for j in range(c, width):
                row[j] = (a * row[j] - b * top[j]) // prev
        prev = a
        rank += 1
        if rank == len(rows):
            break
    return rank


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


def _fails_all(x: int, conds: Sequence[IntersectionCondition]) -> bool:
    return all((x & c.P).bit_count() != c.beta for c in conds)


def first_violation(sys: ConditionSystem) -> dict[str, Any] | None:
    """First (i, j) breaking the triangular criterion, scanning i then j in order."""
    rows = sys.rows
    plain = [[(c.P, c.beta) for c in row.conds] for row in rows]
    for i, row in enumerate(rows):
        x = row.witness
        hit = next(((P, b) for P, b in plain[i] if (x & P).bit_count() == b), None)
        if hit is not None:
            return {"i": i, "j": i, "row_i": row.label, "row_j": row.label,
                    "condition": {"P": elements_of(hit[0]), "beta": hit[1]},
                    "reason": "witness satisfies one of its own conditions"}
        for j in range(i + 1, len(rows)):
            if all((x & P).bit_count() != b for P, b in plain[j]):
                return {"i": i, "j": j, "row_i": row.label, "row_j": rows[j].label,
                        "reason": "witness satisfies no condition of a later row"}
    return None


def triangular_check(sys: ConditionSystem) -> VerificationReport:
    bad = first_violation(sys)
    numbers = {"rows": len(sys), "n": sys.n, "s": sys.s}
    if bad is None:
        return VerificationReport("lemma22", True, numbers, notes=["triangular criterion holds"])
    return VerificationReport("lemma22", False, numbers, [bad], ["triangular criterion fails"])


def lemma22_certificate(sys: ConditionSystem, rank_limit: int = 400,
                        triangular: bool | None = None) -> VerificationReport:
    """Triangular check, the row-count bound and (when the basis is small) exact rank.

    ``triangular`` lets a caller that already established the criterion by other
    means skip the quadratic scan.
    """
    dim = basis_dimension(sys.n, sys.s)
    numbers: dict[str, Any] = {"rows": len(sys), "n": sys.n, "s": sys.s, "bound": dim}
    if triangular is None:
        bad = first_violation(sys)
    else:
        bad = None if triangular else {"reason": "triangular criterion reported failed"}
    numbers["triangular"] = bad is None
    if bad is not None:
        numbers["bound_asserted"] = False
        return VerificationReport("lemma22", False, numbers, [bad],
                                  ["triangular criterion fails; bound not asserted"])
    numbers["bound_asserted"] = True
    witnesses: list[Any] = []
    passed = len(sys) <= dim
    if not passed:
        witnesses.append({"rows": len(sys), "bound": dim})
    if dim <= rank_limit:
        rank = exact_rank(sys.polys())
        numbers["rank"] = rank
        if rank != len(sys):
            passed = False
            witnesses.append({"rank": rank, "rows": len(sys)})
    else:
        numbers["rank"] = None
    return VerificationReport("lemma22", passed, numbers, witnesses)
