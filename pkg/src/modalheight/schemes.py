"""Formula schemes: finite-height axioms, Jankov-Fine formulas, depth
formulas and the translations from ``L[h+1]`` into ``L``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebra import CanonicalModel, atom_formula
from .formula import (FALSUM, Diamond, Formula, FormulaSizeError, Implies,
                      big_and, big_or, box_le, conj, dag_size, dia_le, disj, neg)
from .frames import depths, top_restriction
from .kripke import Model, bits, mask_of

__all__ = [
    "bh_instance", "glivenko_h1", "embedd_pair", "LabelledModel", "top_part",
    "gamma", "jankov_fine_beta", "DepthFormulaSet", "depth_formulas",
    "main_translation", "DEFAULT_FORMULA_CAP",
]

DEFAULT_FORMULA_CAP = 1_000_000


def bh_instance(h: int, psis: Sequence[Formula], m: int, n: int = 1) -> Formula:
    """``B_h(ψ_1..ψ_h)`` with ``B_0 = ⊥`` and
    ``B_{i+1} = ψ_{i+1} → □^{≤m}(◇^{≤m}ψ_{i+1} ∨ B_i)``."""
    if len(psis) != h:
        raise ValueError(f"B_{h} needs {h} formulas, got {len(psis)}")
    b = FALSUM
    for psi in psis:
        b = Implies(psi, box_le(m, disj(dia_le(m, psi, n), b), n))
    return b


def glivenko_h1(f: Formula, m: int, n: int = 1) -> Formula:
    """``◇*□*f``; ``L[1] ⊢ f`` iff ``L ⊢ ◇*□*f``."""
    return dia_le(m, box_le(m, f, n), n)


def embedd_pair(psi: Formula, f: Formula, m: int, n: int = 1) -> tuple[Formula, Formula]:
    """``(□*ψ → □*f, ◇*□*ψ → ◇*□*f)``."""
    return (Implies(box_le(m, psi, n), box_le(m, f, n)),
            Implies(glivenko_h1(psi, m, n), glivenko_h1(f, m, n)))


@dataclass(frozen=True)
class LabelledModel:
    """A finite model whose every world ``b`` carries an isolating formula ``alphas[b]``.

    ``source[b]`` is the index of ``b`` in the canonical model it came from.
    """

    model: Model
    alphas: tuple[Formula, ...]
    source: tuple[int, ...]
    m: int

    @property
    def n(self) -> int:
        return self.model.frame.n

    def __len__(self) -> int:
        return self.model.frame.worlds


def top_part(M: CanonicalModel, h: int) -> LabelledModel:
    """The canonical model of ``L[h]``: the restriction of ``M`` to depth ``≤ h``,
    keeping the labels of the surviving atoms."""
    if h < 1:
        raise ValueError("h must be at least 1")
    fr, index = top_restriction(M.frame, h)
    old = sorted(index, key=index.get)
    valuation = tuple(mask_of(index[x] for x in bits(v) if x in index) for v in M.model.valuation)
    alphas = tuple(atom_formula(M, a) for a in old)
    return LabelledModel(Model(fr, valuation), alphas, tuple(old), M.m)


def _check_size(f: Formula, cap: int) -> Formula:
    size = dag_size(f)
    if size > cap:
        raise FormulaSizeError(f"formula has {size} nodes, cap is {cap}")
    return f


def gamma(T: LabelledModel, cap: int = DEFAULT_FORMULA_CAP) -> Formula:
    """Conjunction of the three boxed diagrams of ``T``: positive edges,
    negative edges, and the disjunction of all labels."""
    fr, m, n, alpha = T.model.frame, T.m, T.n, T.alphas
    W = range(fr.worlds)
    pos, negs = [], []
    for i in range(n):
        for b1 in W:
            for b2 in W:
                seen = Diamond(i, alpha[b2])
                if fr.succ[i][b1] >> b2 & 1:
                    pos.append(Implies(alpha[b1], seen))
                else:
                    negs.append(Implies(alpha[b1], neg(seen)))
    cover = big_or(alpha)
    g = big_and([box_le(m, big_and(pos), n), box_le(m, big_and(negs), n), box_le(m, cover, n)])
    return _check_size(g, cap)


def jankov_fine_beta(T: LabelledModel, a: int, cap: int = DEFAULT_FORMULA_CAP,
                     _gamma: Formula | None = None) -> Formula:
    """``β(a) = α(a) ∧ γ``."""
    g = gamma(T, cap) if _gamma is None else _gamma
    return _check_size(conj(T.alphas[a], g), cap)


@dataclass(frozen=True)
class DepthFormulaSet:
    """``B[i]`` holds exactly at the points of depth ``≤ i`` of ``source``."""

    B: tuple[Formula, ...]
    source: CanonicalModel
    top: LabelledModel | None
    k: int
    m: int
    h: int
    n: int


def depth_formulas(M: CanonicalModel, h: int, cap: int = DEFAULT_FORMULA_CAP) -> DepthFormulaSet:
    """``B[i] = ⋁{β(a) : depth(a) ≤ i}`` over the atoms of the depth-``≤ h`` part, for ``i ≤ h``."""
    if h < 0:
        raise ValueError("h must be non-negative")
    if h == 0:
        return DepthFormulaSet((FALSUM,), M, None, M.k, M.m, 0, M.n)
    T = top_part(M, h)
    g = gamma(T, cap)
    betas = [jankov_fine_beta(T, a, cap, g) for a in range(len(T))]
    d = depths(M.frame)
    B = tuple(_check_size(big_or(betas[a] for a in range(len(T)) if d[T.source[a]] <= i), cap)
              for i in range(h + 1))
    return DepthFormulaSet(B, M, T, M.k, M.m, h, M.n)


def main_translation(f: Formula, B: DepthFormulaSet) -> Formula:
    """``⋀_{i≤h} (□*(□*f → B_i) → B_i)``."""
    if f.max_var >= B.k:
        raise ValueError(f"formula uses p{f.max_var} but the depth formulas are over k={B.k} variables")
    m, n = B.m, B.n
    boxed = box_le(m, f, n)
    return big_and(Implies(box_le(m, Implies(boxed, b), n), b) for b in B.B)
