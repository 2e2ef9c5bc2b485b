"""Text syntax for formulas.

Grammar (whitespace insignificant, precedence unary > & > | > -> > <->)::

    formula := iff
    iff     := imp ("<->" imp)*
    imp     := or ("->" imp)?                 right associative
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "~" unary | "<" INT ">" unary | "[" INT "]" unary
             | "dia" unary | "box" unary | atom
    atom    := "p" INT | "true" | "false" | "(" formula ")"

``render`` prints the kernel AST fully parenthesised; ``pretty`` folds the
sugar patterns back (``~``, ``&``, ``|``, ``[i]``, ``true``).  Both re-parse
to the identical formula.
"""
from __future__ import annotations

import re

from .formula import (FALSUM, TOP, Diamond, Falsum, Formula, Implies, Var,
                      box, conj, disj, iff, neg, postorder)

__all__ = ["ParseError", "parse", "render", "pretty"]


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"""
    \s*(?:
      (?P<num><\d+>|\[\d+\])
    | (?P<op><->|->|[~&|()])
    | (?P<var>p\d+)
    | (?P<word>true|false|dia|box)
    )""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        start = m.start(kind)
        value = m.group(kind)
        # "p12abc" or "trueish" must not silently split
        if kind in ("var", "word") and m.end() < len(text) and (text[m.end()].isalnum() or text[m.end()] == "_"):
            raise ParseError(f"unknown identifier starting with {value!r}", start)
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, n: int | None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.n = n

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, val, pos = self.take()
        if val != value:
            found = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {value!r}, found {found}", pos)

    def formula(self) -> Formula:
        left = self.imp()
        while self.peek()[1] == "<->":
            self.take()
            left = iff(left, self.imp())
        return left

    def imp(self) -> Formula:
        left = self.disjunction()
        if self.peek()[1] == "->":
            self.take()
            return Implies(left, self.imp())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.peek()[1] == "|":
            self.take()
            left = disj(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.peek()[1] == "&":
            self.take()
            left = conj(left, self.unary())
        return left

    def modality(self, index: int, pos: int) -> int:
        if self.n is not None and index >= self.n:
            raise ParseError(f"modality index {index} out of range for n={self.n}", pos)
        return index

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "~":
            self.take()
            return neg(self.unary())
        if kind == "num":
            self.take()
            i = self.modality(int(val[1:-1]), pos)
            body = self.unary()
            return Diamond(i, body) if val[0] == "<" else box(body, i)
        if val in ("dia", "box"):
            self.take()
            self.modality(0, pos)
            body = self.unary()
            return Diamond(0, body) if val == "dia" else box(body, 0)
        return self.atom()

    def atom(self) -> Formula:
        kind, val, pos = self.take()
        if kind == "var":
            return Var(int(val[1:]))
        if val == "true":
            return TOP
        if val == "false":
            return FALSUM
        if val == "(":
            inner = self.formula()
            self.expect(")")
            return inner
        found = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"expected a formula, found {found}", pos)


def parse(text: str, n: int | None = None) -> Formula:
    """Parse ``text``; with ``n`` given, modality indices must be ``< n``."""
    p = _Parser(text, n)
    f = p.formula()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {val!r}", pos)
    return f


def render(f: Formula) -> str:
    """Kernel syntax: ``false``, ``pN``, ``(a -> b)``, ``<i> a``."""
    out: dict[Formula, str] = {}
    for node in postorder(f):
        if isinstance(node, Var):
            out[node] = f"p{node.index}"
        elif isinstance(node, Falsum):
            out[node] = "false"
        elif isinstance(node, Implies):
            out[node] = f"({out[node.left]} -> {out[node.right]})"
        else:
            out[node] = f"<{node.modality}> {out[node.body]}"
    return out[f]


def _match_neg(f: Formula) -> Formula | None:
    if isinstance(f, Implies) and f.right is FALSUM:
        return f.left
    return None


def pretty(f: Formula) -> str:
    """Readable syntax that folds negation, conjunction, disjunction and boxes."""
    memo: dict[Formula, tuple[str, int]] = {}
    for node in postorder(f):
        memo[node] = _pretty_node(node, memo)
    return memo[f][0]


def _wrap(s: str, level: int, need: int) -> str:
    return s if level >= need else f"({s})"


def _pretty_node(node, memo) -> tuple[str, int]:
    # precedence levels: 4 unary/atom, 3 &, 2 |, 1 ->
    # sugar patterns only look at descendants, which postorder has already filled in
    wrap = _wrap
    if isinstance(node, Var):
        return f"p{node.index}", 4
    if isinstance(node, Falsum):
        return "false", 4
    if node is TOP:
        return "true", 4
    if isinstance(node, Diamond):
        s, lv = memo[node.body]
        return f"<{node.modality}> {wrap(s, lv, 4)}", 4
    inner = _match_neg(node)
    if inner is not None:
        # ¬(a -> ¬b) is a ∧ b
        if isinstance(inner, Implies):
            b = _match_neg(inner.right)
            if b is not None:
                (sa, la), (sb, lb) = memo[inner.left], memo[b]
                return f"{wrap(sa, la, 3)} & {wrap(sb, lb, 4)}", 3
        # ¬◇_i¬a is □_i a
        if isinstance(inner, Diamond):
            a = _match_neg(inner.body)
            if a is not None:
                s, lv = memo[a]
                return f"[{inner.modality}] {wrap(s, lv, 4)}", 4
        s, lv = memo[inner]
        return f"~{wrap(s, lv, 4)}", 4
    # ¬a -> b is a ∨ b
    a = _match_neg(node.left)
    if a is not None:
        (sa, la), (sb, lb) = memo[a], memo[node.right]
        return f"{wrap(sa, la, 2)} | {wrap(sb, lb, 3)}", 2
    (sa, la), (sb, lb) = memo[node.left], memo[node.right]
    return f"{wrap(sa, la, 2)} -> {wrap(sb, lb, 1)}", 1

