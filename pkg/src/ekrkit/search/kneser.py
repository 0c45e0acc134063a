"""Kneser graphs: k-subsets of [n] joined when disjoint."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

from ..family import SetFamily

DEFAULT_VERTEX_BUDGET = 250


class BudgetExceeded(RuntimeError):
    """The requested instance is larger than the configured budget."""


@dataclass(frozen=True)
class KneserInstance:
    n: int
    k: int
    vertices: tuple[int, ...]
    adjacency: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    def index(self, block: int) -> int:
        return self._index()[block]

    def _index(self) -> dict[int, int]:
        cached = self.__dict__.get("_idx")
        if cached is None:
            cached = {v: i for i, v in enumerate(self.vertices)}
            object.__setattr__(self, "_idx", cached)
        return cached

    def vertex_mask(self, F: SetFamily) -> int:
        idx = self._index()
        return sum(1 << idx[b] for b in F.blocks)

    def is_independent(self, F: SetFamily) -> bool:
        mask = self.vertex_mask(F)
        rest = mask
        while rest:
            low = rest & -rest
            if self.adjacency[low.bit_length() - 1] & mask:
                return False
            rest ^= low
        return True


def build_instance(n: int, k: int, budget: int = DEFAULT_VERTEX_BUDGET) -> KneserInstance:
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    if comb(n, k) > budget:
        raise BudgetExceeded(f"binom({n},{k}) = {comb(n, k)} vertices exceeds the budget {budget}")
    vertices = tuple(sum(1 << e for e in c) for c in combinations(range(1, n + 1), k))
    adjacency = tuple(
        sum(1 << j for j, w in enumerate(vertices) if not v & w) for v in vertices
    )
    return KneserInstance(n, k, vertices, adjacency)


def independence_number(inst: KneserInstance) -> tuple[int, int]:
    """Size of a largest independent set by plain branch and bound, and the node count.

    The bound covers the candidate set greedily by cliques (pairwise disjoint
    k-sets); an independent set takes at most one vertex from each.
    """
    adj = inst.adjacency
    best = 0
    nodes = 0

    def cover_bound(cand: int) -> int:
        count = 0
        rest = cand
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            clique = low
            pool = rest & adj[v]
            while pool:
                w_low = pool & -pool
                clique |= w_low
                pool &= adj[w_low.bit_length() - 1]
            rest &= ~clique
            count += 1
        return count

    def rec(size: int, cand: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if not cand:
            best = max(best, size)
            return
        if size + cover_bound(cand) <= best:
            return
        low = cand & -cand
        v = low.bit_length() - 1
        rec(size + 1, cand & ~low & ~adj[v])
        rec(size, cand & ~low)

    rec(0, (1 << len(inst)) - 1)
    return best, nodes
