"""Polymodal formulas.

The kernel has four constructors: ``Var``, ``Falsum``, ``Implies`` and
``Diamond``.  Everything else (negation, conjunction, boxes, ...) is sugar
that expands into the kernel when built.

Nodes are hash-consed: building the same formula twice returns the same
object, so equality is identity and formulas form a DAG.  The formulas
produced by the Jankov-Fine construction are huge as trees but small as
DAGs, and every traversal in this package is memoised per node.
"""
from __future__ import annotations

import threading
import weakref
from typing import Callable, Iterable, Iterator, Mapping

__all__ = [
    "Formula", "Var", "Falsum", "Implies", "Diamond", "FALSUM", "TOP",
    "neg", "conj", "disj", "imp", "iff", "box", "dia", "big_and", "big_or",
    "dia_le", "box_le", "star_expand", "substitute", "subformulas",
    "variables", "modal_depth", "dag_size", "tree_size", "postorder",
    "FormulaSizeError",
]

# interning table: structural key -> weak reference to the unique node
_table: dict[tuple, weakref.ref] = {}
_lock = threading.RLock()


class FormulaSizeError(ValueError):
    """A construction exceeded its node budget."""


class Formula:
    __slots__ = ("__weakref__", "depth", "max_var", "_hash")

    depth: int
    max_var: int  # -1 when variable-free

    def children(self) -> tuple["Formula", ...]:
        return ()

    # Equality is identity (nodes are interned); the hash is structural so
    # that set and dict iteration orders do not change between runs.
    def __hash__(self) -> int:
        return self._hash

    # operator sugar: ~f, f & g, f | g, f >> g
    def __invert__(self) -> "Formula":
        return neg(self)

    def __and__(self, other: "Formula") -> "Formula":
        return conj(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return disj(self, other)

    def __rshift__(self, other: "Formula") -> "Formula":
        return Implies(self, other)

    def __repr__(self) -> str:
        from .parser import pretty
        return f"<{type(self).__name__} {pretty(self)}>"

    def __str__(self) -> str:
        from .parser import render
        return render(self)


def _lookup(key: tuple) -> Formula | None:
    ref = _table.get(key)
    return None if ref is None else ref()


def _forget(key: tuple, ref: weakref.ref) -> None:
    with _lock:
        if _table.get(key) is ref:
            del _table[key]


def _intern(key: tuple, make: Callable[[], Formula]) -> Formula:
    with _lock:
        node = _lookup(key)
        if node is None:
            node = make()
            _table[key] = weakref.ref(node, lambda ref, key=key: _forget(key, ref))
    return node


class Var(Formula):
    __slots__ = ("index",)
    index: int

    def __new__(cls, index: int) -> "Var":
        if not isinstance(index, int) or index < 0:
            raise ValueError(f"variable index must be a non-negative int, got {index!r}")

        def make():
            node = object.__new__(cls)
            node.index = index
            node.depth = 0
            node.max_var = index
            node._hash = hash((1, index))
            return node
        return _intern(("v", index), make)

    def __reduce__(self):
        return (Var, (self.index,))


class Falsum(Formula):
    __slots__ = ()

    def __new__(cls) -> "Falsum":
        def make():
            node = object.__new__(cls)
            node.depth = 0
            node.max_var = -1
            node._hash = hash((2,))
            return node
        return _intern(("f",), make)

    def __reduce__(self):
        return (Falsum, ())


class Implies(Formula):
    __slots__ = ("left", "right")
    left: Formula
    right: Formula

    def __new__(cls, left: Formula, right: Formula) -> "Implies":
        key = ("i", left, right)
        node = _lookup(key)
        if node is not None:
            return node

        def make():
            node = object.__new__(cls)
            node.left = left
            node.right = right
            node.depth = max(left.depth, right.depth)
            node.max_var = max(left.max_var, right.max_var)
            node._hash = hash((3, left._hash, right._hash))
            return node
        return _intern(key, make)

    def children(self):
        return (self.left, self.right)

    def __reduce__(self):
        return (Implies, (self.left, self.right))


class Diamond(Formula):
    __slots__ = ("modality", "body")
    modality: int
    body: Formula

    def __new__(cls, modality: int, body: Formula) -> "Diamond":
        if not isinstance(modality, int) or modality < 0:
            raise ValueError(f"modality index must be a non-negative int, got {modality!r}")
        key = ("d", modality, body)
        node = _lookup(key)
        if node is not None:
            return node

        def make():
            node = object.__new__(cls)
            node.modality = modality
            node.body = body
            node.depth = body.depth + 1
            node.max_var = body.max_var
            node._hash = hash((4, modality, body._hash))
            return node
        return _intern(key, make)

    def children(self):
        return (self.body,)

    def __reduce__(self):
        return (Diamond, (self.modality, self.body))


FALSUM = Falsum()


def imp(a: Formula, b: Formula) -> Formula:
    return Implies(a, b)


def neg(a: Formula) -> Formula:
    return Implies(a, FALSUM)


TOP = neg(FALSUM)


def conj(a: Formula, b: Formula) -> Formula:
    return neg(Implies(a, neg(b)))


def disj(a: Formula, b: Formula) -> Formula:
    return Implies(neg(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return conj(Implies(a, b), Implies(b, a))


def dia(a: Formula, i: int = 0) -> Formula:
    return Diamond(i, a)


def box(a: Formula, i: int = 0) -> Formula:
    return neg(Diamond(i, neg(a)))


def _balanced(items: list[Formula], op, empty: Formula) -> Formula:
    # Balanced folding keeps nesting logarithmic in the number of operands;
    # the left half gets len // 2 items.
    if not items:
        return empty
    if len(items) == 1:
        return items[0]
    mid = len(items) // 2
    return op(_balanced(items[:mid], op, empty), _balanced(items[mid:], op, empty))


def big_and(items: Iterable[Formula]) -> Formula:
    """Conjunction of ``items`` in the given order; the empty conjunction is TOP."""
    return _balanced(list(items), conj, TOP)


def big_or(items: Iterable[Formula]) -> Formula:
    """Disjunction of ``items`` in the given order; the empty disjunction is FALSUM."""
    return _balanced(list(items), disj, FALSUM)


def dia_le(m: int, f: Formula, n: int = 1) -> Formula:
    """``◇^{≤m} f``: the disjunction of ``◇^i f`` for ``i = 0..m``.

    ``◇^0 f = f`` and ``◇^{i+1} f = ◇^i(◇_0 f ∨ ... ∨ ◇_{n-1} f)``.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    step = f
    powers = [f]
    for _ in range(m):
        step = big_or(Diamond(j, step) for j in range(n))
        powers.append(step)
    return big_or(powers)


def box_le(m: int, f: Formula, n: int = 1) -> Formula:
    """``□^{≤m} f = ¬◇^{≤m}¬f``."""
    return neg(dia_le(m, neg(f), n))


def postorder(root: Formula) -> Iterator[Formula]:
    """Yield every distinct node of ``root``'s DAG, children before parents."""
    seen: set[int] = set()
    stack: list[tuple[Formula, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            yield node
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for child in reversed(node.children()):
            if id(child) not in seen:
                stack.append((child, False))


def _rebuild(root: Formula, leaf: Callable[[Formula], Formula | None],
             diamond: Callable[[Diamond, Formula], Formula] | None = None) -> Formula:
    out: dict[Formula, Formula] = {}
    for node in postorder(root):
        if isinstance(node, Implies):
            out[node] = Implies(out[node.left], out[node.right])
        elif isinstance(node, Diamond):
            body = out[node.body]
            out[node] = diamond(node, body) if diamond else Diamond(node.modality, body)
        else:
            replaced = leaf(node)
            out[node] = node if replaced is None else replaced
    return out[root]


def substitute(f: Formula, s: Mapping[int, Formula]) -> Formula:
    """Simultaneously replace ``p_j`` by ``s[j]``; unmapped variables stay."""
    return _rebuild(f, lambda node: s.get(node.index) if isinstance(node, Var) else None)


def star_expand(f: Formula, m: int, n: int = 1) -> Formula:
    """Replace every ``◇`` of a unimodal formula by ``◇^{≤m}`` over ``n`` modalities.

    Boxes are sugar for ``¬◇¬`` so they become ``□^{≤m}`` automatically.
    """
    for node in postorder(f):
        if isinstance(node, Diamond) and node.modality != 0:
            raise ValueError(f"formula is not unimodal: uses modality {node.modality}")
    return _rebuild(f, lambda node: None, lambda node, body: dia_le(m, body, n))


def subformulas(f: Formula) -> set[Formula]:
    return set(postorder(f))


def variables(f: Formula) -> set[int]:
    return {node.index for node in postorder(f) if isinstance(node, Var)}


def modal_depth(f: Formula) -> int:
    return f.depth


def modalities(f: Formula) -> set[int]:
    return {node.modality for node in postorder(f) if isinstance(node, Diamond)}


def dag_size(f: Formula) -> int:
    """Number of distinct nodes."""
    return sum(1 for _ in postorder(f))


def tree_size(f: Formula) -> int:
    """Number of nodes of the formula written out as a tree."""
    size: dict[Formula, int] = {}
    for node in postorder(f):
        size[node] = 1 + sum(size[c] for c in node.children())
    return size[f]
