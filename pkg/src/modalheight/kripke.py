"""Finite Kripke frames and models.

Sets of worlds are Python ints used as bitsets (bit ``x`` is world ``x``);
a relation is stored as one successor bitset per world.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .formula import Diamond, Falsum, Formula, Implies, Var, postorder

__all__ = [
    "Frame", "Model", "SizeLimitError", "truth_set", "Evaluator", "frame_validates",
    "reach", "bits", "mask_of", "DEFAULT_VALIDITY_BITS",
]

DEFAULT_VALIDITY_BITS = 24


class SizeLimitError(ValueError):
    """Exhaustive valuation enumeration would exceed the configured bound."""


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask``, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(worlds: Iterable[int]) -> int:
    m = 0
    for w in worlds:
        m |= 1 << w
    return m


@dataclass(frozen=True)
class Frame:
    """A finite frame with ``n`` relations over worlds ``0..worlds-1``.

    ``succ[i][x]`` is the bitset of ``R_i``-successors of ``x``.
    """

    n: int
    worlds: int
    succ: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a frame needs at least one relation")
        if self.worlds < 1:
            raise ValueError("a frame needs at least one world")
        if len(self.succ) != self.n or any(len(row) != self.worlds for row in self.succ):
            raise ValueError("successor table does not match n and worlds")
        full = (1 << self.worlds) - 1
        if any(s & ~full for row in self.succ for s in row):
            raise ValueError("relation mentions a world out of range")

    @classmethod
    def from_pairs(cls, worlds: int, relations: Sequence[Iterable[tuple[int, int]]]) -> "Frame":
        succ = []
        for pairs in relations:
            row = [0] * worlds
            for u, v in pairs:
                if not (0 <= u < worlds and 0 <= v < worlds):
                    raise ValueError(f"pair ({u}, {v}) out of range for {worlds} worlds")
                row[u] |= 1 << v
            succ.append(tuple(row))
        return cls(len(succ), worlds, tuple(succ))

    @classmethod
    def unimodal(cls, worlds: int, pairs: Iterable[tuple[int, int]]) -> "Frame":
        return cls.from_pairs(worlds, [list(pairs)])

    @property
    def full(self) -> int:
        return (1 << self.worlds) - 1

    def pairs(self, i: int = 0) -> list[tuple[int, int]]:
        return [(x, y) for x in range(self.worlds) for y in bits(self.succ[i][x])]

    def union(self) -> tuple[int, ...]:
        """Successor bitsets of ``R_0 ∪ ... ∪ R_{n-1}``."""
        out = [0] * self.worlds
        for row in self.succ:
            for x, s in enumerate(row):
                out[x] |= s
        return tuple(out)

    def preimage(self, i: int, target: int) -> int:
        """``{x : R_i(x) ∩ target ≠ ∅}``, the semantics of ``◇_i``."""
        out = 0
        for x, s in enumerate(self.succ[i]):
            if s & target:
                out |= 1 << x
        return out

    def restrict(self, subset: int) -> tuple["Frame", dict[int, int]]:
        """Restriction to the worlds in ``subset``, with the old->new index map."""
        keep = bits(subset)
        if not keep:
            raise ValueError("cannot restrict a frame to the empty set")
        index = {old: new for new, old in enumerate(keep)}
        succ = []
        for row in self.succ:
            succ.append(tuple(
                mask_of(index[y] for y in bits(row[x] & subset)) for x in keep))
        return Frame(self.n, len(keep), tuple(succ)), index

    # JSON: {"n": n, "worlds": N, "relations": [[[u, v], ...], ...]}
    def to_json(self) -> dict:
        return {"n": self.n, "worlds": self.worlds,
                "relations": [[[u, v] for u, v in self.pairs(i)] for i in range(self.n)]}

    @classmethod
    def from_json(cls, data: dict) -> "Frame":
        try:
            n, worlds, relations = data["n"], data["worlds"], data["relations"]
        except (KeyError, TypeError):
            raise ValueError("frame JSON needs keys 'n', 'worlds' and 'relations'") from None
        if not isinstance(relations, list) or len(relations) != n:
            raise ValueError(f"frame JSON has {len(relations)} relations but n={n}")
        rows = []
        for i, pairs in enumerate(relations):
            seen = set()
            for pair in pairs:
                if len(pair) != 2:
                    raise ValueError(f"relation {i}: malformed pair {pair!r}")
                key = (int(pair[0]), int(pair[1]))
                if key in seen:
                    raise ValueError(f"relation {i}: duplicate pair {list(key)}")
                seen.add(key)
            rows.append(sorted(seen))
        return cls.from_pairs(worlds, rows)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def to_dot(self, name: str = "frame", labels: Sequence[str] | None = None) -> str:
        lines = [f"digraph {name} {{"]
        for x in range(self.worlds):
            label = labels[x] if labels else str(x)
            lines.append(f'  w{x} [label="{_dot_escape(label)}"];')
        for i in range(self.n):
            for u, v in self.pairs(i):
                lines.append(f'  w{u} -> w{v} [label="{i}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


@dataclass(frozen=True)
class Model:
    """A frame with a valuation: ``valuation[j]`` is the bitset where ``p_j`` holds."""

    frame: Frame
    valuation: tuple[int, ...] = field(default=())

    def __post_init__(self):
        full = self.frame.full
        if any(v & ~full for v in self.valuation):
            raise ValueError("valuation mentions a world out of range")

    @property
    def k(self) -> int:
        return len(self.valuation)

    def to_json(self) -> dict:
        return {"frame": self.frame.to_json(),
                "valuation": [bits(v) for v in self.valuation]}


def truth_set(model: Model, f: Formula) -> int:
    """Bitset of worlds of ``model`` where ``f`` is true."""
    fr = model.frame
    if f.max_var >= model.k:
        raise ValueError(f"formula uses p{f.max_var} but the model covers {model.k} variables")
    full = fr.full
    val: list[int] = []
    for op, a, b in _plan(f)[1]:
        if op == _VAR:
            val.append(model.valuation[a])
        elif op == _BOT:
            val.append(0)
        elif op == _IMP:
            val.append((full & ~val[a]) | val[b])
        else:
            if a >= fr.n:
                raise ValueError(f"modality {a} out of range for n={fr.n}")
            val.append(fr.preimage(a, val[b]))
    return val[-1]


class Evaluator:
    """``truth_set`` with a memo shared across calls, for checking many
    formulas that share subformulas against one model."""

    def __init__(self, model: Model):
        self.model = model
        self._memo: dict[Formula, int] = {}

    def __call__(self, f: Formula) -> int:
        memo = self._memo
        if f in memo:
            return memo[f]
        if f.max_var >= self.model.k:
            raise ValueError(f"formula uses p{f.max_var} but the model covers {self.model.k} variables")
        fr = self.model.frame
        full = fr.full
        stack = [f]
        while stack:
            node = stack[-1]
            if node in memo:
                stack.pop()
                continue
            pending = [c for c in node.children() if c not in memo]
            if pending:
                stack.extend(pending)
                continue
            stack.pop()
            if isinstance(node, Var):
                memo[node] = self.model.valuation[node.index]
            elif isinstance(node, Falsum):
                memo[node] = 0
            elif isinstance(node, Implies):
                memo[node] = (full & ~memo[node.left]) | memo[node.right]
            else:
                if node.modality >= fr.n:
                    raise ValueError(f"modality {node.modality} out of range for n={fr.n}")
                memo[node] = fr.preimage(node.modality, memo[node.body])
        return memo[f]


def _column_pattern(bit: int, length: int) -> int:
    """Bitset over ``range(length)`` holding the indices ``v`` with bit ``bit`` of ``v`` set."""
    half = 1 << bit
    period = half << 1
    if period > length:
        return 0
    block = ((1 << half) - 1) << half
    repunit = ((1 << length) - 1) // ((1 << period) - 1)
    return block * repunit


@lru_cache(maxsize=512)
def _plan(f: Formula) -> tuple[tuple[int, ...], tuple[tuple, ...]]:
    """Straight-line program for ``f``: the occurring variables (sorted) and
    one instruction per DAG node, children first.  Instructions refer to
    earlier results by position."""
    nodes = list(postorder(f))
    pos = {node: i for i, node in enumerate(nodes)}
    occurring = tuple(sorted({node.index for node in nodes if isinstance(node, Var)}))
    program = []
    for node in nodes:
        if isinstance(node, Var):
            program.append((_VAR, node.index, 0))
        elif isinstance(node, Falsum):
            program.append((_BOT, 0, 0))
        elif isinstance(node, Implies):
            program.append((_IMP, pos[node.left], pos[node.right]))
        else:
            program.append((_DIA, node.modality, pos[node.body]))
    return occurring, tuple(program)


_VAR, _BOT, _IMP, _DIA = range(4)


def frame_validates(fr: Frame, f: Formula, max_bits: int = DEFAULT_VALIDITY_BITS) -> bool:
    """Is ``f`` true at every world of ``fr`` under every valuation?

    All ``2^(|vars|·N)`` valuations are evaluated at once: the truth value of
    a subformula is stored world-major, one column of ``2^(|vars|·N)`` bits
    per world, bit ``v`` of a column standing for valuation number ``v``.
    """
    occurring, program = _plan(f)
    N = fr.worlds
    nbits = len(occurring) * N
    if nbits > max_bits:
        raise SizeLimitError(
            f"{len(occurring)} variables on {N} worlds need 2^{nbits} valuations (limit 2^{max_bits})")
    slot = {var: s for s, var in enumerate(occurring)}
    width = 1 << nbits
    ones = (1 << width) - 1
    worlds = range(N)
    succ_lists = [[bits(row[x]) for x in worlds] for row in fr.succ]
    val: list[list[int]] = []
    for op, a, b in program:
        if op == _VAR:
            s = slot[a]
            val.append([_column_pattern(s * N + w, width) for w in worlds])
        elif op == _BOT:
            val.append([0] * N)
        elif op == _IMP:
            left, right = val[a], val[b]
            val.append([(ones & ~left[w]) | right[w] for w in worlds])
        else:
            if a >= fr.n:
                raise ValueError(f"modality {a} out of range for n={fr.n}")
            body = val[b]
            cols = []
            for targets in succ_lists[a]:
                c = 0
                for y in targets:
                    c |= body[y]
                cols.append(c)
            val.append(cols)
    return all(c == ones for c in val[-1])


def _compose_step(rel: tuple[int, ...], base: tuple[int, ...]) -> tuple[int, ...]:
    """``R ∘ S`` style step: x reaches ``∪_{y ∈ rel(x)} base(y)``."""
    out = []
    for s in rel:
        acc = 0
        for y in bits(s):
            acc |= base[y]
        out.append(acc)
    return tuple(out)


def reach(fr: Frame, bound: int | None = None) -> tuple[int, ...]:
    """Successor bitsets of ``R^{≤m}`` (``bound=m``) or of ``R*`` (``bound=None``),
    where ``R`` is the union of the frame's relations and ``R^0`` is the identity."""
    R = fr.union()
    cur = tuple(1 << x for x in range(fr.worlds))
    steps = 0
    while bound is None or steps < bound:
        nxt = tuple(c | e for c, e in zip(cur, _compose_step(R, cur)))
        steps += 1
        if nxt == cur:
            break
        cur = nxt
    return cur
