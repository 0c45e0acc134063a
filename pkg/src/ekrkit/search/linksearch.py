"""Exact search over intersecting families through their link structure.

Fix the element 1 as a most frequent element ``p``.  A family is then a set
F0 of k-sets avoiding ``p`` plus the links T: (k-1)-sets ``t`` with
``{p} + t`` in the family.  For a maximal family T is forced: it is every
link meeting all blocks of F0.  So the search branches on F0 only and reads
|F| = |F0| + |T| off the surviving links.

Internally element ``e`` of ``[n]`` is bit ``e - 2`` of the ground ``[2, n]``
shifted down by one, i.e. masks here use bit ``e - 1`` and ``p`` is bit 0.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

CHECK_EVERY = 512


class SearchTimeout(RuntimeError):
    """The deadline passed before the search finished."""

    def __init__(self, message: str, nodes: int = 0) -> None:
        super().__init__(message)
        self.nodes = nodes


def _colex(c: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(reversed(c))


def kk_table(N: int, s: int, r: int, maxm: int) -> list[int]:
    """``out[m]``: the fewest r-subsets covered by m distinct s-subsets of an N-set.

    The colex-initial segment attains the minimum (Kruskal-Katona).
    """
    sets = sorted(combinations(range(N), s), key=_colex)
    out = [0]
    shadow: set[tuple[int, ...]] = set()
    for c in sets[:maxm]:
        shadow.update(combinations(c, r))
        out.append(len(shadow))
    return out


@dataclass
class Solution:
    f0: tuple[int, ...]  # candidate indices
    links: int  # bitset over links


@dataclass
class TaskResult:
    solutions: list[Solution] = field(default_factory=list)
    nodes: int = 0
    best: int = -1


class LinkSpace:
    """Candidate blocks avoiding ``p``, links, and the bitset tables the search needs."""

    def __init__(self, n: int, k: int) -> None:
        if k < 2 or n < 2 * k:
            raise ValueError(f"link search needs k >= 2 and n >= 2k, got n={n}, k={k}")
        self.n, self.k = n, k
        ground = list(range(1, n))
        self.ground = ground
        self.cands = [sum(1 << e for e in c) for c in combinations(ground, k)]
        self.links = [sum(1 << e for e in c) for c in combinations(ground, k - 1)]
        self.NC, self.NT = len(self.cands), len(self.links)
        self.kills = [
            sum(1 << j for j, t in enumerate(self.links) if not t & c) for c in self.cands
        ]
        self.disjoint = [
            sum(1 << j for j, d in enumerate(self.cands) if not c & d) for c in self.cands
        ]
        self.avoiding = {
            v: sum(1 << j for j, t in enumerate(self.links) if not t >> v & 1) for v in ground
        }
        self.kk = kk_table(n - 1, n - 1 - k, k - 1, self.NC)
        self.index = {c: j for j, c in enumerate(self.cands)}
        self._low: dict[int, list[int]] = {}

    def low_meet(self, s: int) -> list[int]:
        """``low_meet(s)[j]``: candidates meeting candidate j in fewer than s elements."""
        if s not in self._low:
            pc = int.bit_count
            self._low[s] = [
                sum(1 << i for i, d in enumerate(self.cands) if pc(c & d) < s) for c in self.cands
            ]
        return self._low[s]

    def anchor(self, s: int) -> int:
        """Index of {1..s} + {k+1..2k-s} (internal labels), which meets cands[0] in s elements."""
        k = self.k
        mask = sum(1 << e for e in list(range(1, s + 1)) + list(range(k + 1, 2 * k + 1 - s)))
        return self.index[mask]

    def tasks(self) -> list[tuple[str, int]]:
        """Top-level cases: one block in F0, or a pair realising the least pairwise meet s."""
        return [("single", 0)] + [("pair", s) for s in range(self.k - 1, 0, -1)]

    def external(self, mask: int) -> int:
        return mask << 1

    # -- maximal families -----------------------------------------------------

    def maximal_task(self, task: tuple[str, int], L: int, deadline: float) -> TaskResult:
        """All maximal families in this case with F0 nonempty, p of maximum degree, |F| >= L."""
        return _Runner(self, L, deadline, fixed=None).run(task)

    def fixed_task(self, task: tuple[str, int], x: int, deadline: float) -> TaskResult:
        """Largest |T| over intersecting F0 with |F0| = x in this case, with all optimal F0."""
        return _Runner(self, 0, deadline, fixed=x).run(task)


@lru_cache(maxsize=8)
def link_space(n: int, k: int) -> LinkSpace:
    return LinkSpace(n, k)


class _Runner:
    def __init__(self, sp: LinkSpace, L: int, deadline: float, fixed: int | None) -> None:
        self.sp = sp
        self.L = L
        self.deadline = deadline
        self.fixed = fixed
        self.result = TaskResult()

    def run(self, task: tuple[str, int]) -> TaskResult:
        sp = self.sp
        full_T = (1 << sp.NT) - 1
        full_C = (1 << sp.NC) - 1
        kills, disjoint = sp.kills, sp.disjoint
        a1 = sp.cands[0]
        deg0 = {v: a1 >> v & 1 for v in sp.ground}
        kind, s = task
        if kind == "single":
            if self.fixed is not None and self.fixed < 1:
                return self.result
            if self.fixed is None:
                exc = full_C & ~disjoint[0] & ~1
                self.rec(1, exc, 1, full_T & ~kills[0], 0, deg0, [0] * sp.NC)
            else:
                self.rec(1, 0, 1, full_T & ~kills[0], 0, deg0, [0] * sp.NC)
            return self.result
        if self.fixed is not None and self.fixed < 2:
            return self.result
        low = sp.low_meet(s)
        j2 = sp.anchor(s)
        exc = (full_C & ~1 & ~disjoint[0]) & low[0] if self.fixed is None else 0
        avail = full_C & ~low[0] & ~1
        state = self.add(j2, 1, exc, 1, full_T & ~kills[0], avail, deg0, low)
        self.rec(*state, low)
        return self.result

    def add(self, j, inc, exc, m0, T, avail, f0deg, low):
        sp = self.sp
        c = sp.cands[j]
        removed = avail & low[j]
        avail &= ~low[j] & ~(1 << j)
        if self.fixed is None:
            exc |= removed & ~sp.disjoint[j]
        f0deg = f0deg.copy()
        for v in sp.ground:
            if c >> v & 1:
                f0deg[v] += 1
        return inc | (1 << j), exc, m0 + 1, T & ~sp.kills[j], avail, f0deg

    def degree_ok(self, f0deg, T) -> bool:
        avoiding = self.sp.avoiding
        return all(f0deg[v] <= (T & avoiding[v]).bit_count() for v in self.sp.ground)

    def kk_bound(self, m0: int, T: int, avail: int) -> int:
        """Largest |F0| + |T| reachable, from Kruskal-Katona on the complements of F0."""
        sp = self.sp
        pc = int.bit_count
        tT = pc(T)
        killed = sp.NT - tT
        per_block = pc(sp.kills[0])
        olds = []
        a = avail
        while a:
            low = a & -a
            a ^= low
            olds.append(per_block - pc(sp.kills[low.bit_length() - 1] & T))
        olds.sort(reverse=True)
        best = -1
        acc = 0
        k, n = sp.k, sp.n
        for r in range(0, len(olds) + 1):
            if r:
                acc += olds[r - 1]
            m = m0 + r
            if self.fixed is not None and m != self.fixed:
                continue
            fresh = sp.kk[r] - min(killed, acc)
            tf = min(tT - max(fresh, 0), sp.NT - sp.kk[m])
            if k * m > (n - k) * tf:
                continue
            best = max(best, m + tf)
        return best

    def matching_bound(self, m0: int, T: int, avail: int) -> int:
        """|F0| + |T| + |avail| - nu, nu a maximum matching of avail into the links it kills."""
        kills = self.sp.kills
        left = []
        a = avail
        while a:
            low = a & -a
            left.append(low.bit_length() - 1)
            a ^= low
        owner: dict[int, int] = {}
        nu = 0
        for j in left:
            seen = 0

            def augment(j: int) -> bool:
                nonlocal seen
                r = kills[j] & T & ~seen
                while r:
                    lb = r & -r
                    r ^= lb
                    seen |= lb
                    t = lb.bit_length() - 1
                    if t not in owner or augment(owner[t]):
                        owner[t] = j
                        return True
                return False

            if augment(j):
                nu += 1
        return m0 + T.bit_count() + len(left) - nu

    def tick(self) -> None:
        self.result.nodes += 1
        if self.result.nodes % CHECK_EVERY == 0 and time.monotonic() > self.deadline:
            raise SearchTimeout("search deadline passed", self.result.nodes)

    def rec(self, inc, exc, m0, T, avail, f0deg, low) -> None:
        self.tick()
        if not self.degree_ok(f0deg, T):
            return
        if self.fixed is not None:
            self.rec_fixed(inc, m0, T, avail, f0deg, low)
            return
        sp = self.sp
        disjoint, kills = sp.disjoint, sp.kills
        while True:
            forced = -1
            still = 0
            e = exc
            while e:
                lowbit = e & -e
                e ^= lowbit
                a = lowbit.bit_length() - 1
                if inc & disjoint[a]:
                    continue
                still |= lowbit
                if T & kills[a]:
                    continue
                blockers = avail & disjoint[a]
                if not blockers:
                    return
                if blockers & (blockers - 1) == 0:
                    forced = blockers.bit_length() - 1
                    break
            if forced < 0:
                exc = still
                break
            inc, exc, m0, T, avail, f0deg = self.add(forced, inc, exc, m0, T, avail, f0deg, low)
            if not self.degree_ok(f0deg, T):
                return
        if self.kk_bound(m0, T, avail) < self.L:
            return
        if self.matching_bound(m0, T, avail) < self.L:
            return
        if not avail:
            if m0 + T.bit_count() >= self.L:
                self.result.solutions.append(Solution(_bits(inc), T))
            return
        j = (avail & -avail).bit_length() - 1
        self.rec(*self.add(j, inc, exc, m0, T, avail, f0deg, low), low)
        self.rec(inc, exc | (1 << j), m0, T, avail & ~(1 << j), f0deg, low)

    def rec_fixed(self, inc, m0, T, avail, f0deg, low) -> None:
        x = self.fixed
        res = self.result
        if m0 == x:
            size = T.bit_count()
            if size > res.best:
                res.best = size
                res.solutions = []
            if size == res.best:
                res.solutions.append(Solution(_bits(inc), T))
            return
        if m0 + avail.bit_count() < x:
            return
        if T.bit_count() < res.best:
            return
        if self.kk_bound(m0, T, avail) - x < res.best:
            return
        j = (avail & -avail).bit_length() - 1
        inc2, _, m2, T2, avail2, deg2 = self.add(j, inc, 0, m0, T, avail, f0deg, low)
        avail2 &= ~self.sp.disjoint[j]
        self.rec(inc2, 0, m2, T2, avail2, deg2, low)
        self.rec(inc, 0, m0, T, avail & ~(1 << j), f0deg, low)


def _bits(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)
