"""Formula and frame generators for the verification suites.

Exhaustive enumeration lists formulas of the surface language (variables,
``false``, ``~``, ``&``, ``|``, ``->``, ``<i>``, ``[i]``) by syntactic size,
and within one size by rendered text.  Formulas that expand to the same
kernel formula are listed once, at their first (smallest) occurrence.
"""
from __future__ import annotations

import random
from typing import Iterator

from .formula import FALSUM, Formula, Implies, Var, box, conj, dia, disj, neg
from .frames import euclidean_closure, random_frame
from .kripke import Frame, reach
from .parser import render

__all__ = [
    "enumerate_formulas", "formula_batch", "random_formula",
    "random_euclidean_frame", "random_preorder", "all_frames",
]

_BINARY = (conj, disj, Implies)


def _by_size(k: int, n: int, max_depth: int) -> Iterator[list[Formula]]:
    """Yield, for size 1, 2, ..., the new formulas of exactly that size."""
    seen: set[Formula] = set()
    levels: list[list[Formula]] = [[]]
    size = 0
    while True:
        size += 1
        fresh: list[Formula] = []

        def offer(f: Formula) -> None:
            if f.depth <= max_depth and f not in seen:
                seen.add(f)
                fresh.append(f)

        if size == 1:
            for j in range(k):
                offer(Var(j))
            offer(FALSUM)
        else:
            for a in levels[size - 1]:
                offer(neg(a))
                for i in range(n):
                    offer(dia(a, i))
                    offer(box(a, i))
            for left in range(1, size - 1):
                right = size - 1 - left
                for a in levels[left]:
                    for b in levels[right]:
                        for op in _BINARY:
                            offer(op(a, b))
        fresh.sort(key=render)
        levels.append(fresh)
        yield fresh


def enumerate_formulas(k: int, max_depth: int, count: int | None = None,
                       max_size: int | None = None, n: int = 1) -> Iterator[Formula]:
    """Distinct formulas over ``p_0..p_{k-1}`` of modal depth ``≤ max_depth``,
    in order of size and then rendered text.

    Stops after ``count`` formulas or after size ``max_size``; at least one
    of the two must be given.
    """
    if count is None and max_size is None:
        raise ValueError("give count or max_size")
    produced = 0
    for size, level in enumerate(_by_size(k, n, max_depth), start=1):
        if max_size is not None and size > max_size:
            return
        for f in level:
            yield f
            produced += 1
            if count is not None and produced >= count:
                return


def formula_batch(k: int, max_depth: int, count: int, n: int = 1) -> list[Formula]:
    return list(enumerate_formulas(k, max_depth, count=count, n=n))


def random_formula(rng: random.Random, k: int, depth: int, n: int = 1, leaf_bias: float = 0.3) -> Formula:
    """A random surface formula over ``p_0..p_{k-1}`` with modal depth ``≤ depth``."""
    def go(budget: int, d: int) -> Formula:
        if budget <= 1 or rng.random() < leaf_bias:
            return FALSUM if rng.random() < 0.1 or k == 0 else Var(rng.randrange(k))
        choice = rng.randrange(6 if d > 0 else 4)
        if choice == 0:
            return neg(go(budget - 1, d))
        if choice <= 3:
            op = _BINARY[choice - 1]
            return op(go(budget // 2, d), go(budget // 2, d))
        i = rng.randrange(n)
        body = go(budget - 1, d - 1)
        return dia(body, i) if choice == 4 else box(body, i)
    return go(10, depth)


def random_euclidean_frame(rng: random.Random, max_worlds: int = 6, density: float = 0.3) -> Frame:
    N = rng.randint(1, max_worlds)
    return euclidean_closure(random_frame(N, 1, density, rng=rng))


def random_preorder(rng: random.Random, max_worlds: int = 6, max_height: int = 2) -> Frame:
    """A random reflexive transitive frame whose skeleton has height ``≤ max_height``.

    Worlds are grouped into clusters, clusters are placed on levels
    ``0..max_height-1``, and each cluster sees a random set of clusters on
    higher levels.
    """
    N = rng.randint(1, max_worlds)
    cluster_of = [rng.randrange(N) for _ in range(N)]
    ids = sorted(set(cluster_of))
    level = {c: rng.randrange(max_height) for c in ids}
    above = {c: {d for d in ids if level[d] > level[c] and rng.random() < 0.5} for c in ids}
    pairs = [(x, y) for x in range(N) for y in range(N)
             if cluster_of[x] == cluster_of[y] or cluster_of[y] in above[cluster_of[x]]]
    fr = Frame.unimodal(N, pairs)
    star = reach(fr)  # levels make the cluster graph acyclic, so this only adds transitivity
    return Frame(1, N, (star,))


def all_frames(worlds: int, n: int = 1) -> Iterator[Frame]:
    """Every frame with the given number of worlds and ``n`` relations."""
    N = worlds
    per = N * N
    row_mask = (1 << N) - 1
    for code in range(1 << (per * n)):
        succ = []
        for i in range(n):
            rel = code >> (i * per)
            succ.append(tuple((rel >> (x * N)) & row_mask for x in range(N)))
        yield Frame(n, N, tuple(succ))
