"""Set families on a ground set ``[n] = {1, ..., n}``.

A subset of ``[n]`` is stored as an ``int`` whose bit ``e`` is set when the
element ``e`` belongs to it (bit 0 is never used).  Every public function
speaks 1-based elements; the bitmask is only a storage detail.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

CANONICAL_LIMIT = 12


class FamilyError(ValueError):
    """Raised when an operation receives a family outside its domain."""


class CanonicalTooLarge(FamilyError):
    """Raised when canonical labelling is requested above the size limit."""


def mask_of(elements: Iterable[int]) -> int:
    mask = 0
    for e in elements:
        mask |= 1 << e
    return mask


def elements_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def full_mask(n: int) -> int:
    return ((1 << n) - 1) << 1


def k_subsets(ground: Sequence[int], k: int) -> Iterator[int]:
    """Masks of all k-subsets of ``ground``; lexicographic when ``ground`` is sorted."""
    for combo in combinations(ground, k):
        yield mask_of(combo)


def lex_key(mask: int) -> tuple[int, ...]:
    return tuple(elements_of(mask))


@dataclass(frozen=True)
class ElementSet:
    """A validated subset of ``[n]``."""

    n: int
    mask: int

    def __post_init__(self) -> None:
        if self.mask & ~full_mask(self.n):
            raise FamilyError(f"mask {self.mask:#x} has bits outside 1..{self.n}")

    @classmethod
    def of(cls, n: int, elements: Iterable[int]) -> ElementSet:
        return cls(n, mask_of(elements))

    def elements(self) -> list[int]:
        return elements_of(self.mask)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, e: int) -> bool:
        return bool(self.mask >> e & 1)


@dataclass(frozen=True)
class SetFamily:
    """Distinct subsets of ``[n]`` kept in lexicographic order of their element lists."""

    n: int
    blocks: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise FamilyError("ground-set size must be non-negative")
        outside = ~full_mask(self.n)
        keys = []
        for b in self.blocks:
            if b < 0 or b & outside:
                raise FamilyError(f"block {elements_of(b)} is not a subset of [{self.n}]")
            keys.append(lex_key(b))
        if len(set(self.blocks)) != len(self.blocks):
            raise FamilyError("blocks must be pairwise distinct")
        if keys != sorted(keys):
            object.__setattr__(self, "blocks", tuple(b for _, b in sorted(zip(keys, self.blocks))))

    @classmethod
    def of(cls, n: int, sets: Iterable[Iterable[int]]) -> SetFamily:
        """Build from element lists; duplicates are rejected, order is normalised."""
        return cls(n, tuple(mask_of(s) for s in sets))

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int]) -> SetFamily:
        return cls(n, tuple(masks))

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[int]:
        return iter(self.blocks)

    def __contains__(self, block: object) -> bool:
        if isinstance(block, ElementSet):
            block = block.mask
        return block in self.block_set

    @property
    def block_set(self) -> frozenset[int]:
        cached = self.__dict__.get("_block_set")
        if cached is None:
            cached = frozenset(self.blocks)
            object.__setattr__(self, "_block_set", cached)
        return cached

    def sets(self) -> list[list[int]]:
        return [elements_of(b) for b in self.blocks]

    def uniformity(self) -> int | None:
        """Common block size, or None for an empty or mixed family."""
        sizes = {b.bit_count() for b in self.blocks}
        return sizes.pop() if len(sizes) == 1 else None

    def restrict(self, predicate) -> SetFamily:
        return SetFamily(self.n, tuple(b for b in self.blocks if predicate(b)))

    def relabel(self, perm: dict[int, int] | Sequence[int]) -> SetFamily:
        """Apply ``e -> perm[e]``; a sequence is indexed by element (index 0 ignored)."""
        return SetFamily(self.n, tuple(apply_perm(b, perm) for b in self.blocks))


def apply_perm(mask: int, perm: dict[int, int] | Sequence[int]) -> int:
    out = 0
    for e in elements_of(mask):
        out |= 1 << perm[e]
    return out


def is_intersecting(F: SetFamily) -> bool:
    return disjoint_pair(F) is None


def disjoint_pair(F: SetFamily) -> tuple[int, int] | None:
    """Some pair of disjoint blocks, or None.

    Blocks through a most frequent element meet each other, so only pairs
    involving a block that avoids it need checking.
    """
    if len(F) < 2:
        return None
    if 0 in F.block_set:
        other = next(b for b in F.blocks if b)
        return (0, other)
    p, _ = max_degree(F)
    bit = 1 << p
    avoid = [b for b in F.blocks if not b & bit]
    for a in avoid:
        for b in F.blocks:
            if not a & b:
                return (a, b) if lex_key(a) < lex_key(b) else (b, a)
    return None


def is_uniform(F: SetFamily, k: int) -> bool:
    if k < 0:
        raise FamilyError("k must be non-negative")
    return all(b.bit_count() == k for b in F.blocks)


def _require_uniform(F: SetFamily, k: int) -> None:
    for b in F.blocks:
        if b.bit_count() != k:
            raise FamilyError(f"block {elements_of(b)} does not have size {k}")


def shadow(F: SetFamily, k: int) -> SetFamily:
    """All (k-1)-subsets of blocks of the k-uniform family ``F``."""
    if k < 1:
        raise FamilyError("shadow needs k >= 1")
    _require_uniform(F, k)
    out = set()
    for b in F.blocks:
        rest = b
        while rest:
            low = rest & -rest
            out.add(b ^ low)
            rest ^= low
    return SetFamily(F.n, tuple(out))


def degrees(F: SetFamily) -> list[int]:
    """``degrees(F)[e]`` is the number of blocks containing ``e`` (index 0 unused)."""
    deg = [0] * (F.n + 1)
    for b in F.blocks:
        for e in elements_of(b):
            deg[e] += 1
    return deg


def max_degree(F: SetFamily) -> tuple[int, int]:
    """The element of largest degree (smallest such element) and its degree."""
    if not F.blocks:
        raise FamilyError("max_degree of an empty family")
    deg = degrees(F)
    best = max(deg[1:])
    return deg.index(best, 1), best


def common_intersection(F: SetFamily) -> int:
    inter = full_mask(F.n)
    for b in F.blocks:
        inter &= b
    return inter


def sunflower_core(F: SetFamily) -> ElementSet | None:
    """The common pairwise intersection, if every two blocks meet in the same set."""
    if len(F) < 2:
        raise FamilyError("a sunflower needs at least two blocks")
    blocks = F.blocks
    core = blocks[0] & blocks[1]
    for i, a in enumerate(blocks):
        for b in blocks[i + 1:]:
            if a & b != core:
                return None
    return ElementSet(F.n, core)


def is_star(F: SetFamily) -> bool:
    return common_intersection(F) != 0


def addable_sets(F: SetFamily, k: int) -> Iterator[int]:
    """k-sets outside ``F`` meeting every block of ``F``."""
    for cand in k_subsets(range(1, F.n + 1), k):
        if cand in F.block_set:
            continue
        if all(cand & b for b in F.blocks):
            yield cand


def is_maximal_intersecting(F: SetFamily, k: int) -> bool:
    """True when no k-set can join ``F`` without breaking the intersecting property."""
    _require_uniform(F, k)
    if not is_intersecting(F):
        raise FamilyError("is_maximal_intersecting needs an intersecting family")
    return addable_witness(F, k) is None


def addable_witness(F: SetFamily, k: int) -> int | None:
    """Some k-set outside ``F`` that meets every block, or None.

    Splits around a most frequent element ``p``.  A set through ``p`` only has
    to meet the blocks avoiding ``p``.  Once every such set is present, a set
    ``A`` avoiding ``p`` meets every block through ``p`` exactly when no
    (k-1)-subset of ``U = [n] - A - p`` meets all blocks avoiding ``p``, i.e.
    when the traces of those blocks on ``U`` have no hitting set of size k-1.
    """
    n = F.n
    if not F.blocks or n < 2 * k:
        # the hitting-set argument needs room for a (k-1)-set inside U
        return next(addable_sets(F, k), None)
    p, _ = max_degree(F)
    bit = 1 << p
    avoid = [b for b in F.blocks if not b & bit]
    rest = [e for e in range(1, n + 1) if e != p]
    present = F.block_set
    for link in k_subsets(rest, k - 1):
        cand = link | bit
        if cand not in present and all(link & b for b in avoid):
            return cand
    if len(avoid) < k:
        # traces of fewer than k blocks always have a hitting set of size <= k-1,
        # unless a trace is empty, which forces A to equal that block
        return None
    others = full_mask(n) & ~bit
    for cand in k_subsets(rest, k):
        if cand in present or not all(cand & b for b in avoid):
            continue
        traces = [b & others & ~cand for b in avoid]
        if 0 in traces:
            continue
        if not _has_small_hitting_set(traces, k - 1):
            return cand
    return None


def _has_small_hitting_set(sets: list[int], budget: int) -> bool:
    if not sets:
        return True
    if budget == 0:
        return False
    first = min(sets, key=int.bit_count)
    for e in elements_of(first):
        bit = 1 << e
        if _has_small_hitting_set([s for s in sets if not s & bit], budget - 1):
            return True
    return False


# ---------------------------------------------------------------------------
# Isomorphism
# ---------------------------------------------------------------------------


def _check_canonical_size(n: int, limit: int) -> None:
    if n > limit:
        raise CanonicalTooLarge(f"n={n} is too large for canonical labelling (limit {limit})")


def twin_classes(F: SetFamily) -> list[int]:
    """``cls[e]`` is the least element ``u`` such that swapping ``u`` and ``e`` fixes ``F``.

    Swap-invariance is an equivalence relation, so these classes are exact.
    """
    n = F.n
    cls = list(range(n + 1))
    blocks = F.block_set
    for e in range(1, n + 1):
        for u in range(1, e):
            if cls[u] != u:
                continue
            if _swap_fixes(blocks, u, e):
                cls[e] = u
                break
    return cls


def _swap_fixes(blocks: frozenset[int], u: int, v: int) -> bool:
    bu, bv = 1 << u, 1 << v
    for b in blocks:
        if bool(b & bu) != bool(b & bv):
            if b ^ bu ^ bv not in blocks:
                return False
    return True


def canonical_labelling(F: SetFamily, limit: int = CANONICAL_LIMIT) -> list[int]:
    """A relabelling ``perm`` (``perm[old] = new``) realising :func:`canonical_form`.

    Relabellings are compared through their block lists with blocks taken in
    colexicographic order; the least one is selected.  Labels are assigned
    ``1, 2, ...`` in turn, and the blocks whose largest label was just assigned
    form the next segment of the comparison, so partial labellings can be
    pruned exactly.  Swapping twin elements never changes the outcome, so
    only one element per twin class is tried at each depth.
    """
    n = F.n
    _check_canonical_size(n, limit)
    twins = twin_classes(F)
    deg = degrees(F)
    by_elem: list[list[int]] = [[] for _ in range(n + 1)]
    for b in F.blocks:
        for e in elements_of(b):
            by_elem[e].append(b)

    best: list[int] | None = None
    best_segments: list[int] = []
    segments: list[int] = []
    order = [0] * (n + 1)  # order[new] = old
    new_of = [0] * (n + 1)

    def segment(r: int, old: int) -> int:
        # blocks through `old` whose other elements all carry labels < r;
        # an earlier colex position owns a more significant bit
        width = 1 << (r - 1)
        value = 0
        for b in by_elem[old]:
            rest = 0
            for e in elements_of(b):
                if e == old:
                    continue
                lab = new_of[e]
                if not lab:
                    break
                rest |= 1 << (lab - 1)
            else:
                value |= 1 << (width - 1 - rest)
        return value

    def dfs(r: int) -> None:
        nonlocal best, best_segments
        if r > n:
            if best is None or segments > best_segments:
                best = order[1:].copy()
                best_segments = segments.copy()
            return
        tried: set[int] = set()
        candidates = sorted((e for e in range(1, n + 1) if not new_of[e]), key=lambda e: -deg[e])
        for e in candidates:
            if twins[e] in tried:
                continue
            tried.add(twins[e])
            new_of[e] = r
            order[r] = e
            segments.append(segment(r, e))
            if best is None or segments >= best_segments[:r]:
                dfs(r + 1)
            segments.pop()
            new_of[e] = 0

    dfs(1)
    assert best is not None
    perm = [0] * (n + 1)
    for new, old in enumerate(best, start=1):
        perm[old] = new
    return perm


def canonical_form(F: SetFamily, limit: int = CANONICAL_LIMIT) -> SetFamily:
    """The colex-least relabelling of ``F`` over all permutations of ``[n]``."""
    if F.n == 0 or not F.blocks:
        return F
    return F.relabel(canonical_labelling(F, limit))


def _invariant(F: SetFamily) -> tuple:
    return (len(F), sorted(b.bit_count() for b in F.blocks), sorted(degrees(F)[1:]))


def is_isomorphic(F1: SetFamily, F2: SetFamily, limit: int = CANONICAL_LIMIT) -> bool:
    if F1.n != F2.n:
        raise FamilyError(f"ground sets differ: n={F1.n} vs n={F2.n}")
    _check_canonical_size(F1.n, limit)
    if _invariant(F1) != _invariant(F2):
        return False
    return canonical_form(F1, limit) == canonical_form(F2, limit)


def is_subfamily_up_to_iso(F: SetFamily, T: SetFamily, limit: int = CANONICAL_LIMIT) -> bool:
    """True when some permutation of ``[n]`` maps every block of ``F`` into ``T``."""
    if F.n != T.n:
        raise FamilyError(f"ground sets differ: n={F.n} vs n={T.n}")
    _check_canonical_size(F.n, limit)
    return find_embedding(F, T) is not None


def find_embedding(F: SetFamily, T: SetFamily) -> list[int] | None:
    """A permutation ``perm`` (``perm[old] = new``) with ``perm(F)`` inside ``T``, or None."""
    n = F.n
    if len(F) > len(T):
        return None
    target = T.block_set
    size_count_T: dict[int, int] = {}
    for b in T.blocks:
        size_count_T[b.bit_count()] = size_count_T.get(b.bit_count(), 0) + 1
    for size, count in _size_counts(F).items():
        if size_count_T.get(size, 0) < count:
            return None
    degF, degT = degrees(F), degrees(T)
    twinsT = twin_classes(T)
    # map high-degree elements first; untouched elements go anywhere
    order = sorted((e for e in range(1, n + 1) if degF[e]), key=lambda e: -degF[e])
    by_last: dict[int, list[int]] = {e: [] for e in order}
    pos = {e: i for i, e in enumerate(order)}
    for b in F.blocks:
        if b:
            last = max(elements_of(b), key=lambda e: pos[e])
            by_last[last].append(b)
    if 0 in F.block_set and 0 not in target:
        return None
    image = [0] * (n + 1)
    used = [False] * (n + 1)

    def fits(e: int) -> bool:
        for b in by_last[e]:
            m = 0
            for x in elements_of(b):
                m |= 1 << image[x]
            if m not in target:
                return False
        return True

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        e = order[i]
        tried = set()
        for v in range(1, n + 1):
            if used[v] or degT[v] < degF[e] or twinsT[v] in tried:
                continue
            tried.add(twinsT[v])
            image[e] = v
            used[v] = True
            if fits(e) and extend(i + 1):
                return True
            used[v] = False
        image[e] = 0
        return False

    if not extend(0):
        return None
    free = [v for v in range(1, n + 1) if not used[v]]
    for e in range(1, n + 1):
        if not image[e]:
            image[e] = free.pop(0)
    return image


def _size_counts(F: SetFamily) -> dict[int, int]:
    out: dict[int, int] = {}
    for b in F.blocks:
        out[b.bit_count()] = out.get(b.bit_count(), 0) + 1
    return out
