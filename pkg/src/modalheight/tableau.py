"""Signed tableaux for the unimodal logics K, T, K4, S4 and S5.

A tableau node is a set of signed formulas ``(True, φ)`` / ``(False, φ)``.
K, T, K4 and S4 explore one world at a time: saturate the node under the
Boolean rules (branching on ``T(a → b)``), then open a successor for every
``T◇φ``.  In K4 and S4 the ``F◇ψ`` formulas travel to successors, and a
successor whose seed is contained in an ancestor (or the node itself) is
closed by an edge back to that ancestor.  S5 is searched as a single
cluster, where ``◇``-formulas have one truth value for all worlds.

Open tableaux are turned into finite countermodels.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .formula import Diamond, Falsum, Formula, Implies, Var, neg, postorder
from .kripke import Frame, Model, mask_of, reach

__all__ = ["NAMED_LOGICS", "TableauResult", "prove", "find_model"]

Signed = tuple[bool, Formula]

NAMED_LOGICS = {
    # name: (reflexive, transitive)
    "K": (False, False),
    "T": (True, False),
    "K4": (False, True),
    "S4": (True, True),
    "S5": (True, True),
}


@dataclass
class TableauResult:
    valid: bool
    countermodel: Model | None = None
    world: int | None = None


class _Closed(Exception):
    pass


def _add(content: set, alpha: list, beta: list, item: Signed) -> None:
    if item in content:
        return
    sign, f = item
    if (not sign, f) in content or (sign and isinstance(f, Falsum)):
        raise _Closed
    content.add(item)
    if isinstance(f, Implies):
        (beta if sign else alpha).append(item)
    elif isinstance(f, Diamond) and not sign:
        alpha.append(item)


def _saturations(seed, reflexive: bool):
    """Open Boolean saturations of ``seed`` (depth-first over branch choices)."""
    content: set = set()
    alpha: list = []
    beta: list = []
    try:
        for item in seed:
            _add(content, alpha, beta, item)
    except _Closed:
        return
    yield from _expand(content, alpha, beta, reflexive)


def _expand(content, alpha, beta, reflexive):
    try:
        while True:
            while alpha:
                sign, f = alpha.pop()
                if isinstance(f, Implies):  # F(a → b)
                    _add(content, alpha, beta, (True, f.left))
                    _add(content, alpha, beta, (False, f.right))
                elif reflexive:  # F◇ψ with a reflexive relation
                    _add(content, alpha, beta, (False, f.body))
            while beta:
                _, f = beta[-1]
                if (False, f.left) in content or (True, f.right) in content:
                    beta.pop()
                    continue
                break
            if not beta:
                break
            _, f = beta.pop()
            for choice in ((False, f.left), (True, f.right)):
                c2, a2, b2 = set(content), list(alpha), list(beta)
                try:
                    _add(c2, a2, b2, choice)
                except _Closed:
                    continue
                yield from _expand(c2, a2, b2, reflexive)
            return
    except _Closed:
        return
    yield frozenset(content)


@dataclass(eq=False)
class _Node:
    content: frozenset
    succ: list = field(default_factory=list)


class _Search:
    def __init__(self, reflexive: bool, transitive: bool):
        self.reflexive = reflexive
        self.transitive = transitive
        self.unsat: set = set()
        self.sat: dict = {}

    def successor_seed(self, content, body: Formula) -> frozenset:
        seed = {(True, body)}
        for sign, g in content:
            if not sign and isinstance(g, Diamond):
                seed.add((False, g.body))
                if self.transitive:
                    seed.add((False, g))
        return frozenset(seed)

    def solve(self, seed: frozenset, ancestors: list) -> _Node | None:
        if seed in self.unsat:
            return None
        if not self.transitive and seed in self.sat:
            return self.sat[seed]
        for content in _saturations(seed, self.reflexive):
            node = _Node(content)
            chain = ancestors + [node]
            ok = True
            for sign, f in content:
                if not (sign and isinstance(f, Diamond)):
                    continue
                child_seed = self.successor_seed(content, f.body)
                if self.transitive:
                    loop = next((a for a in reversed(chain) if child_seed <= a.content), None)
                    if loop is not None:
                        node.succ.append(loop)
                        continue
                child = self.solve(child_seed, chain)
                if child is None:
                    ok = False
                    break
                node.succ.append(child)
            if ok:
                if not self.transitive:
                    self.sat[seed] = node
                return node
        self.unsat.add(seed)
        return None


def _extract(root: _Node, reflexive: bool, transitive: bool, k: int) -> Model:
    index: dict[int, int] = {}
    order: list[_Node] = []
    stack = [root]
    while stack:
        node = stack.pop()
        if id(node) in index:
            continue
        index[id(node)] = len(order)
        order.append(node)
        stack.extend(reversed(node.succ))
    N = len(order)
    succ = [mask_of(index[id(c)] for c in node.succ) for node in order]
    if reflexive:
        succ = [s | 1 << x for x, s in enumerate(succ)]
    frame = Frame(1, N, (tuple(succ),))
    if transitive:
        star = reach(frame)
        # R⁺ = R ∘ R*
        plus = []
        for x in range(N):
            acc = 0
            for y in range(N):
                if succ[x] >> y & 1:
                    acc |= star[y]
            plus.append(acc)
        frame = Frame(1, N, (tuple(plus),))
    return Model(frame, _valuation([node.content for node in order], k))


def _valuation(contents, k: int) -> tuple[int, ...]:
    return tuple(mask_of(x for x, c in enumerate(contents) if (True, Var(j)) in c) for j in range(k))


def _s5_search(worlds: list, universal: dict):
    """Search for an open single-cluster tableau; returns the world contents or None.

    ``universal`` (a dict used as an ordered set) holds the signed formulas
    true at every world of the cluster.
    """
    worlds = [set(w) for w in worlds]
    universal = dict(universal)
    while True:
        changed = False
        for w in worlds:
            for u in universal:
                if u not in w:
                    if (not u[0], u[1]) in w:
                        return None
                    w.add(u)
                    changed = True
        branch = None
        for wi, w in enumerate(worlds):
            for sign, f in list(w):
                if isinstance(f, Falsum) and sign:
                    return None
                if isinstance(f, Implies):
                    if sign:
                        if (False, f.left) not in w and (True, f.right) not in w and branch is None:
                            branch = (wi, f)
                        continue
                    new = [(True, f.left), (False, f.right)]
                elif isinstance(f, Diamond):
                    if sign:
                        if (True, f) not in universal:
                            universal[(True, f)] = None
                            changed = True
                        continue
                    for u in ((False, f), (False, f.body)):
                        if u not in universal:
                            universal[u] = None
                            changed = True
                    continue
                else:
                    continue
                for item in new:
                    if item not in w:
                        if (not item[0], item[1]) in w:
                            return None
                        w.add(item)
                        changed = True
        if changed:
            continue
        if branch is not None:
            wi, f = branch
            for choice in ((False, f.left), (True, f.right)):
                if (not choice[0], choice[1]) in worlds[wi]:
                    continue
                trial = [set(w) for w in worlds]
                trial[wi].add(choice)
                found = _s5_search(trial, universal)
                if found is not None:
                    return found
            return None
        for sign, f in universal:
            if sign and isinstance(f, Diamond) and not any((True, f.body) in w for w in worlds):
                worlds.append({(True, f.body), *universal})
                changed = True
                break
        if not changed:
            return worlds


def find_model(logic: str, f: Formula) -> tuple[Model, int] | None:
    """Tableau search for a model of ``f`` in the named logic."""
    logic = logic.upper()
    if logic not in NAMED_LOGICS:
        raise ValueError(f"unknown logic {logic!r}; expected one of {sorted(NAMED_LOGICS)}")
    if any(node.modality != 0 for node in postorder(f) if isinstance(node, Diamond)):
        raise ValueError("named logics are unimodal")
    k = f.max_var + 1
    seed = frozenset({(True, f)})
    if logic == "S5":
        worlds = _s5_search([set(seed)], {})
        if worlds is None:
            return None
        N = len(worlds)
        frame = Frame(1, N, (tuple([(1 << N) - 1] * N),))
        return Model(frame, _valuation(worlds, k)), 0
    reflexive, transitive = NAMED_LOGICS[logic]
    root = _Search(reflexive, transitive).solve(seed, [])
    if root is None:
        return None
    return _extract(root, reflexive, transitive, k), 0


def prove(logic: str, f: Formula) -> TableauResult:
    """Is ``f`` a theorem of the named logic?  If not, the result carries a
    finite countermodel refuting ``f`` at ``world``."""
    found = find_model(logic, neg(f))
    if found is None:
        return TableauResult(True)
    return TableauResult(False, *found)
