"""Finite free algebras of frame-class logics and their canonical models.

For ``L = Log(F_1, ..., F_r)`` the k-generated free algebra of ``L`` is the
subalgebra of the product of complex algebras ``Π_{F, V} Cm(F)`` (one factor
per frame ``F`` and per valuation ``V`` of ``p_0..p_{k-1}``) generated by the
diagonal elements ``g_j = {(F, V, w) : w ∈ V(p_j)}``.

An element is a bitset over *coordinates* ``(F, V, w)``.  Inside the block
of frame ``F`` (``N`` worlds, ``2^{kN}`` valuations) the coordinate of
``(V, w)`` is ``offset_F + w·2^{kN} + V``, so each world owns a contiguous
column of valuation bits and ``◇_i`` is an OR of columns.

The atoms are found by partition refinement: start from the partition by
truth values of the variables, then split blocks by ``◇_i`` of blocks until
every ``◇_i``-image of a block is a union of blocks.  The resulting
partition generates exactly the closure of the generators, and each split
records a formula, so every atom comes with a defining label of the form
``p_0^± ∧ ... ∧ p_{k-1}^± ∧ φ``.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

from .formula import (FALSUM, TOP, Diamond, Falsum, Formula, Implies, Var,
                      big_and, big_or, conj, neg, postorder)
from .frames import transitivity_degree
from .kripke import Frame, Model, _column_pattern, bits, mask_of

__all__ = [
    "FrameClassLogic", "FreeAlgebra", "CanonicalModel", "CapExceeded",
    "BudgetExceeded", "build_free_algebra", "free_algebra",
    "dual_canonical_model", "canonical_model", "atom_formula",
    "subalgebra_size_probe", "DEFAULT_CAP", "DEFAULT_BIT_BUDGET",
]

DEFAULT_CAP = 100_000
DEFAULT_BIT_BUDGET = 1 << 20


class CapExceeded(RuntimeError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"algebra has {size} elements, cap is {cap}")
        self.size = size
        self.cap = cap


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class FrameClassLogic:
    """The logic of a finite list of finite frames sharing ``n``."""

    frames: tuple[Frame, ...]

    def __post_init__(self):
        if not self.frames:
            raise ValueError("a frame-class logic needs at least one frame")
        object.__setattr__(self, "frames", tuple(self.frames))
        if len({f.n for f in self.frames}) != 1:
            raise ValueError("all frames must have the same number of relations")

    @property
    def n(self) -> int:
        return self.frames[0].n

    @cached_property
    def m(self) -> int:
        """Least ``m`` with ``◇^{m+1}p → ◇^{≤m}p`` valid on every frame."""
        return max(transitivity_degree(f) for f in self.frames)

    def to_json(self) -> list[dict]:
        return [f.to_json() for f in self.frames]

    @cached_property
    def fingerprint(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class _Layout:
    k: int
    frames: tuple[Frame, ...]
    offsets: tuple[int, ...]
    widths: tuple[int, ...]  # valuations per frame, 2^{kN}
    size: int

    @classmethod
    def of(cls, logic: FrameClassLogic, k: int, bit_budget: int) -> "_Layout":
        offsets, widths, total = [], [], 0
        for f in logic.frames:
            if k * f.worlds > bit_budget.bit_length():
                raise BudgetExceeded(f"{k} variables on a {f.worlds}-world frame exceed the bit budget")
            width = 1 << (k * f.worlds)
            offsets.append(total)
            widths.append(width)
            total += width * f.worlds
            if total > bit_budget:
                raise BudgetExceeded(f"more than {bit_budget} coordinates needed")
        return cls(k, logic.frames, tuple(offsets), tuple(widths), total)

    def coordinate(self, frame: int, valuation: int, world: int) -> int:
        return self.offsets[frame] + world * self.widths[frame] + valuation

    def decode(self, index: int) -> tuple[int, int, int]:
        """Coordinate index -> (frame, valuation number, world)."""
        for fi in reversed(range(len(self.frames))):
            if index >= self.offsets[fi]:
                world, valuation = divmod(index - self.offsets[fi], self.widths[fi])
                return fi, valuation, world
        raise IndexError(index)

    def valuation(self, frame: int, valuation: int) -> tuple[int, ...]:
        """Valuation number ``v`` as bitsets: ``p_j`` holds at w iff bit ``j·N + w`` of v."""
        N = self.frames[frame].worlds
        return tuple((valuation >> (j * N)) & ((1 << N) - 1) for j in range(self.k))

    def generator(self, j: int) -> int:
        out = 0
        for fi, f in enumerate(self.frames):
            width = self.widths[fi]
            for w in range(f.worlds):
                out |= _column_pattern(j * f.worlds + w, width) << self.coordinate(fi, 0, w)
        return out

    def diamond(self, i: int, e: int) -> int:
        out = 0
        for fi, f in enumerate(self.frames):
            width = self.widths[fi]
            colmask = (1 << width) - 1
            base = self.offsets[fi]
            cols = [(e >> (base + y * width)) & colmask for y in range(f.worlds)]
            row = f.succ[i]
            for x in range(f.worlds):
                c = 0
                for y in bits(row[x]):
                    c |= cols[y]
                if c:
                    out |= c << (base + x * width)
        return out


@dataclass(frozen=True)
class FreeAlgebra:
    """The k-generated free algebra of a frame-class logic, held by its atoms.

    Elements are coordinate bitsets; every union of atoms is an element.
    ``atom_profiles[a]`` is the literal part ``p_0^± ∧ ... ∧ p_{k-1}^±`` and
    ``atom_bodies[a]`` the modal part of the label of atom ``a``.
    """

    logic: FrameClassLogic
    k: int
    layout: _Layout = field(repr=False)
    atoms: tuple[int, ...] = field(repr=False)
    atom_profiles: tuple[Formula, ...] = field(repr=False)
    atom_bodies: tuple[Formula | None, ...] = field(repr=False)
    generators: tuple[int, ...] = field(repr=False)

    @property
    def universe(self) -> int:
        return (1 << self.layout.size) - 1

    @property
    def size(self) -> int:
        return 1 << len(self.atoms)

    @cached_property
    def atom_labels(self) -> tuple[Formula, ...]:
        return tuple(p if b is None else conj(p, b)
                     for p, b in zip(self.atom_profiles, self.atom_bodies))

    def complement(self, e: int) -> int:
        return self.universe & ~e

    def diamond(self, i: int, e: int) -> int:
        return self.layout.diamond(i, e)

    def dia_le(self, m: int, e: int) -> int:
        """``◇^{≤m} e`` computed with the algebra's own operators."""
        acc, step = e, e
        for _ in range(m):
            nxt = 0
            for i in range(self.logic.n):
                nxt |= self.diamond(i, step)
            step = nxt
            acc |= step
        return acc

    def atoms_below(self, e: int) -> list[int]:
        """Indices of the atoms contained in element ``e``."""
        return [a for a, mask in enumerate(self.atoms) if mask & e == mask]

    def element(self, atom_indices: Sequence[int]) -> int:
        out = 0
        for a in atom_indices:
            out |= self.atoms[a]
        return out

    def label(self, e: int) -> Formula:
        """Defining formula of element ``e``: ⊥, ⊤, a generator, or the
        disjunction of its atoms' labels."""
        below = self.atoms_below(e)
        if self.element(below) != e:
            raise ValueError("not an element of this algebra")
        return self._label_of(e, below)

    def _label_of(self, e: int, below: list[int]) -> Formula:
        if e == 0:
            return FALSUM
        if e == self.universe:
            return TOP
        for j, g in enumerate(self.generators):
            if e == g:
                return Var(j)
        return big_or(self.atom_labels[a] for a in below)

    def elements(self, cap: int = DEFAULT_CAP) -> Iterator[tuple[int, Formula]]:
        """All elements with their labels; refuses when there are more than ``cap``."""
        if self.size > cap:
            raise CapExceeded(self.size, cap)
        for e, below in self.elements_with_atoms(cap):
            yield e, self._label_of(e, below)

    def elements_with_atoms(self, cap: int = DEFAULT_CAP) -> Iterator[tuple[int, list[int]]]:
        """All elements, each with the indices of the atoms below it."""
        if self.size > cap:
            raise CapExceeded(self.size, cap)
        A = len(self.atoms)
        for code in range(1 << A):
            below = [a for a in range(A) if code >> a & 1]
            yield self.element(below), below

    def evaluate(self, f: Formula) -> int:
        """The element denoted by a k-formula."""
        if f.max_var >= self.k:
            raise ValueError(f"formula uses p{f.max_var}, algebra has k={self.k}")
        full = self.universe
        val: dict[Formula, int] = {}
        for node in postorder(f):
            if isinstance(node, Var):
                val[node] = self.generators[node.index]
            elif isinstance(node, Falsum):
                val[node] = 0
            elif isinstance(node, Implies):
                val[node] = (full & ~val[node.left]) | val[node.right]
            else:
                if node.modality >= self.logic.n:
                    raise ValueError(f"modality {node.modality} out of range")
                val[node] = self.diamond(node.modality, val[node.body])
        return val[f]

    def source_model(self, coordinate: int) -> tuple[Model, int]:
        """The model ``(F, V)`` and world ``w`` a coordinate stands for."""
        fi, v, w = self.layout.decode(coordinate)
        return Model(self.logic.frames[fi], self.layout.valuation(fi, v)), w


def _literal(j: int, positive: bool) -> Formula:
    return Var(j) if positive else neg(Var(j))


def free_algebra(logic: FrameClassLogic, k: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> FreeAlgebra:
    """Atoms of the k-generated free algebra, by partition refinement."""
    if k < 0:
        raise ValueError("k must be non-negative")
    layout = _Layout.of(logic, k, bit_budget)
    universe = (1 << layout.size) - 1
    gens = tuple(layout.generator(j) for j in range(k))

    # block = (mask, profile literals, modal splits)
    blocks: list[tuple[int, list[Formula], list[Formula]]] = [(universe, [], [])]
    for j, g in enumerate(gens):
        nxt = []
        for mask, lits, splits in blocks:
            for part, positive in ((mask & g, True), (mask & ~g, False)):
                if part:
                    nxt.append((part, lits + [_literal(j, positive)], splits))
        blocks = nxt

    def label(block) -> Formula:
        _, lits, splits = block
        profile = big_and(lits)
        return profile if not splits else conj(profile, big_and(splits))

    while True:
        labels = [label(b) for b in blocks]
        pre = [[layout.diamond(i, b[0]) for b in blocks] for i in range(logic.n)]
        refined = []
        for block in blocks:
            pieces = [block]
            for i in range(logic.n):
                for d, image in enumerate(pre[i]):
                    split = []
                    for mask, lits, splits in pieces:
                        inside = mask & image
                        if inside and inside != mask:
                            seen = Diamond(i, labels[d])
                            split.append((inside, lits, splits + [seen]))
                            split.append((mask & ~image, lits, splits + [neg(seen)]))
                        else:
                            split.append((mask, lits, splits))
                    pieces = split
            refined.extend(pieces)
        if len(refined) == len(blocks):
            break
        blocks = refined

    blocks.sort(key=lambda b: b[0] & -b[0])
    return FreeAlgebra(
        logic=logic, k=k, layout=layout,
        atoms=tuple(b[0] for b in blocks),
        atom_profiles=tuple(big_and(b[1]) for b in blocks),
        atom_bodies=tuple(big_and(b[2]) if b[2] else None for b in blocks),
        generators=gens,
    )


def build_free_algebra(logic: FrameClassLogic, k: int, cap: int = DEFAULT_CAP,
                       bit_budget: int = DEFAULT_BIT_BUDGET) -> FreeAlgebra:
    """Like ``free_algebra`` but refuses algebras with more than ``cap`` elements."""
    A = free_algebra(logic, k, bit_budget)
    if A.size > cap:
        raise CapExceeded(A.size, cap)
    return A


@dataclass(frozen=True)
class CanonicalModel:
    """The atom dual of a free algebra: the finite k-canonical model."""

    algebra: FreeAlgebra
    model: Model

    @property
    def frame(self) -> Frame:
        return self.model.frame

    @property
    def k(self) -> int:
        return self.algebra.k

    @property
    def m(self) -> int:
        return self.algebra.logic.m

    @property
    def n(self) -> int:
        return self.algebra.logic.n

    @property
    def atom_labels(self) -> tuple[Formula, ...]:
        return self.algebra.atom_labels

    def __len__(self) -> int:
        return self.model.frame.worlds


def dual_canonical_model(A: FreeAlgebra) -> CanonicalModel:
    """Atoms become worlds; ``a R_i b`` iff ``a ≤ ◇_i b``; ``a ⊨ p_j`` iff ``a ≤ g_j``."""
    atoms = A.atoms
    succ = []
    for i in range(A.logic.n):
        images = [A.diamond(i, b) for b in atoms]
        succ.append(tuple(
            mask_of(bi for bi, img in enumerate(images) if a & img == a) for a in atoms))
    valuation = tuple(mask_of(ai for ai, a in enumerate(atoms) if a & g == a) for g in A.generators)
    frame = Frame(A.logic.n, len(atoms), tuple(succ))
    return CanonicalModel(A, Model(frame, valuation))


def canonical_model(logic: FrameClassLogic, k: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> CanonicalModel:
    return dual_canonical_model(free_algebra(logic, k, bit_budget))


def atom_formula(M: CanonicalModel, a: int) -> Formula:
    """``α(a)``: literal profile of ``a`` conjoined with its modal part;
    true exactly at ``a`` in ``M``."""
    profile = M.algebra.atom_profiles[a]
    body = M.algebra.atom_bodies[a]
    return profile if body is None else conj(profile, body)


def subalgebra_size_probe(fr: Frame, generators: Sequence[int], cap: int = DEFAULT_CAP) -> int:
    """Size of the subalgebra of the complex algebra of ``fr`` generated by
    ``generators`` (world bitsets), by worklist closure."""
    full = fr.full
    seen = {0, full}
    queue = [0, full]
    for g in generators:
        if g & ~full:
            raise ValueError("generator mentions a world out of range")
        if g not in seen:
            seen.add(g)
            queue.append(g)
    done: list[int] = []
    while queue:
        e = queue.pop()
        new = [full & ~e] + [fr.preimage(i, e) for i in range(fr.n)]
        new += [e & d for d in done]
        done.append(e)
        for x in new:
            if x not in seen:
                seen.add(x)
                queue.append(x)
                if len(seen) > cap:
                    raise CapExceeded(len(seen), cap)
    return len(seen)
