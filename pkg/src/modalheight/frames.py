"""Order-theoretic structure of finite frames.

Everything here is computed from the reachability preorder ``R*`` of the
union relation: clusters are its strongly connected components, the
skeleton is the condensation, and heights count clusters along chains.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property

from .kripke import Frame, bits, mask_of, reach

__all__ = [
    "Skeleton", "skeleton", "transitivity_degree", "height", "depth", "depths",
    "top_restriction", "is_h_heavy", "maximal_elements", "omega_top_frame",
    "neighbor_exclusion_frame", "random_frame", "euclidean_closure",
    "chain_preorder", "cluster_frame", "disjoint_union",
]


@dataclass(frozen=True)
class Skeleton:
    """Clusters (bitsets, ordered by least world) and the strict order between them."""

    clusters: tuple[int, ...]
    cluster_of: tuple[int, ...]
    above: tuple[int, ...]  # above[c]: bitset of clusters D with C < D

    @cached_property
    def depth(self) -> tuple[int, ...]:
        """Height of the up-set of each cluster, counted in clusters."""
        order = sorted(range(len(self.clusters)), key=lambda c: bin(self.above[c]).count("1"))
        d = [0] * len(self.clusters)
        # a cluster strictly above C has a strictly smaller up-set
        for c in order:
            d[c] = 1 + max((d[u] for u in bits(self.above[c])), default=0)
        return tuple(d)

    @property
    def height(self) -> int:
        return max(self.depth)

    def edges(self) -> list[tuple[int, int]]:
        return [(c, u) for c in range(len(self.clusters)) for u in bits(self.above[c])]


def skeleton(fr: Frame) -> Skeleton:
    star = reach(fr)
    back = [0] * fr.worlds
    for x in range(fr.worlds):
        for y in bits(star[x]):
            back[y] |= 1 << x
    cluster_of = [-1] * fr.worlds
    clusters = []
    for x in range(fr.worlds):
        if cluster_of[x] < 0:
            members = star[x] & back[x]
            for y in bits(members):
                cluster_of[y] = len(clusters)
            clusters.append(members)
    above = []
    for c, members in enumerate(clusters):
        x = bits(members)[0]
        up = {cluster_of[y] for y in bits(star[x])} - {c}
        above.append(mask_of(up))
    return Skeleton(tuple(clusters), tuple(cluster_of), tuple(above))


def transitivity_degree(fr: Frame) -> int:
    """Least ``m`` with ``R^{≤m} = R*``."""
    star = reach(fr)
    m = 0
    while reach(fr, m) != star:
        m += 1
    return m


def height(fr: Frame) -> int:
    return skeleton(fr).height


def depths(fr: Frame) -> tuple[int, ...]:
    sk = skeleton(fr)
    return tuple(sk.depth[c] for c in sk.cluster_of)


def depth(fr: Frame, x: int) -> int:
    """Height of the subframe generated by ``x``."""
    return depths(fr)[x]


def top_restriction(fr: Frame, h: int) -> tuple[Frame, dict[int, int]]:
    """Restriction to the worlds of depth ``≤ h``, with the old->new index map."""
    if h < 1:
        raise ValueError("h must be at least 1")
    return fr.restrict(mask_of(x for x, d in enumerate(depths(fr)) if d <= h))


def is_h_heavy(fr: Frame, h: int) -> bool:
    """Every world of depth ``> h`` sees (via ``R*``) a world of depth exactly ``h``."""
    if h < 1:
        raise ValueError("h must be at least 1")
    d = depths(fr)
    star = reach(fr)
    exact = mask_of(x for x in range(fr.worlds) if d[x] == h)
    return all(star[x] & exact for x in range(fr.worlds) if d[x] > h)


def maximal_elements(fr: Frame, subset: int) -> int:
    """``R*``-maximal elements of ``subset``: x such that every y in the subset
    reachable from x reaches x back."""
    if not subset:
        raise ValueError("maximal elements of the empty set are undefined")
    star = reach(fr)
    out = 0
    for x in bits(subset):
        if all(star[y] >> x & 1 for y in bits(star[x] & subset)):
            out |= 1 << x
    return out


def omega_top_frame(N: int) -> Frame:
    """Worlds ``0..N`` with ``x R y`` iff ``x ≤ y`` or ``x = N``; world N plays ω."""
    if N < 1:
        raise ValueError("N must be at least 1")
    return Frame.unimodal(N + 1, [(x, y) for x in range(N + 1) for y in range(N + 1)
                                  if x <= y or x == N])


def neighbor_exclusion_frame(N: int) -> Frame:
    """Worlds ``0..N``; for ``x, y < N``, ``x R y`` iff neither is the successor
    of the other, and every world sees ``N``, which plays ω."""
    if N < 1:
        raise ValueError("N must be at least 1")
    pairs = [(x, y) for x in range(N) for y in range(N) if x != y + 1 and y != x + 1]
    pairs += [(x, N) for x in range(N + 1)]
    return Frame.unimodal(N + 1, pairs)


def random_frame(N: int, n: int = 1, density: float = 0.5, seed: int | None = None,
                 rng: random.Random | None = None) -> Frame:
    if N < 1:
        raise ValueError("N must be at least 1")
    rng = rng or random.Random(seed)
    rels = [[(x, y) for x in range(N) for y in range(N) if rng.random() < density]
            for _ in range(n)]
    return Frame.from_pairs(N, rels)


def euclidean_closure(fr: Frame) -> Frame:
    """Least Euclidean extension (``xRy ∧ xRz → yRz``) of each relation."""
    succ = []
    for row in fr.succ:
        row = list(row)
        changed = True
        while changed:
            changed = False
            for x in range(fr.worlds):
                for y in bits(row[x]):
                    new = row[y] | row[x]
                    if new != row[y]:
                        row[y] = new
                        changed = True
        succ.append(tuple(row))
    return Frame(fr.n, fr.worlds, tuple(succ))


def chain_preorder(length: int) -> Frame:
    """Reflexive transitive chain ``0 ≤ 1 ≤ ... ≤ length-1``."""
    return Frame.unimodal(length, [(x, y) for x in range(length) for y in range(x, length)])


def cluster_frame(size: int) -> Frame:
    """A single cluster: the total relation on ``size`` worlds."""
    return Frame.unimodal(size, [(x, y) for x in range(size) for y in range(size)])


def disjoint_union(*frames: Frame) -> Frame:
    n = frames[0].n
    if any(f.n != n for f in frames):
        raise ValueError("frames must share the number of relations")
    offset = 0
    rels: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for f in frames:
        for i in range(n):
            rels[i] += [(u + offset, v + offset) for u, v in f.pairs(i)]
        offset += f.worlds
    return Frame.from_pairs(offset, rels)
