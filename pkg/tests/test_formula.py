import pickle

import pytest
from hypothesis import given

from modalheight.formula import (FALSUM, TOP, Diamond, Falsum, Implies, Var, big_and, big_or,
                                 box, box_le, conj, dag_size, dia, dia_le, disj, modal_depth,
                                 neg, star_expand, subformulas, substitute, tree_size, variables)
from strategies import formulas

p0, p1 = Var(0), Var(1)


def test_hash_consing_gives_identity():
    assert Implies(p0, Var(1)) is Implies(Var(0), p1)
    assert Diamond(0, p0) is dia(p0)
    assert Falsum() is FALSUM
    assert Implies(p0, p1) != Implies(p1, p0)


def test_sugar_expands_to_kernel():
    assert neg(p0) is Implies(p0, FALSUM)
    assert TOP is Implies(FALSUM, FALSUM)
    assert disj(p0, p1) is Implies(neg(p0), p1)
    assert conj(p0, p1) is neg(Implies(p0, neg(p1)))
    assert box(p0) is neg(Diamond(0, neg(p0)))


def test_operators():
    assert (p0 & p1) is conj(p0, p1)
    assert (p0 | p1) is disj(p0, p1)
    assert (p0 >> p1) is Implies(p0, p1)
    assert ~p0 is neg(p0)


def test_invalid_indices():
    with pytest.raises(ValueError):
        Var(-1)
    with pytest.raises(ValueError):
        Diamond(-2, p0)


def test_empty_big_connectives():
    assert big_or([]) is FALSUM
    assert big_and([]) is TOP
    assert big_or([p0]) is p0


def test_big_or_is_balanced_and_ordered():
    a, b, c = Var(0), Var(1), Var(2)
    assert big_or([a, b, c]) is disj(a, disj(b, c))
    assert big_and([a, b, c, Var(3)]) is conj(conj(a, b), conj(c, Var(3)))


def test_dia_le_examples():
    assert dia_le(0, p0) is p0
    assert dia_le(1, p0) is disj(p0, dia(p0))
    assert dia_le(1, p0, n=2) is disj(p0, disj(Diamond(0, p0), Diamond(1, p0)))
    step = dia(p0)
    assert dia_le(2, p0) is disj(p0, disj(step, dia(step)))


def test_box_le_is_dual():
    assert box_le(2, p1, 3) is neg(dia_le(2, neg(p1), 3))
    with pytest.raises(ValueError):
        dia_le(-1, p0)


@given(formulas(n=2))
def test_dia_le_adds_m_to_depth(f):
    for m in range(3):
        assert modal_depth(dia_le(m, f, 2)) == modal_depth(f) + m


def test_star_expand_examples():
    assert star_expand(dia(p0), 1) is disj(p0, dia(p0))
    assert star_expand(p0, 3, 2) is p0
    assert star_expand(box(p0), 1) is neg(disj(neg(p0), dia(neg(p0))))


def test_star_expand_rejects_polymodal():
    with pytest.raises(ValueError):
        star_expand(Diamond(1, p0), 1, 2)


@given(formulas(), formulas())
def test_star_expand_distributes_over_implication(f, g):
    assert star_expand(Implies(f, g), 2, 2) is Implies(star_expand(f, 2, 2), star_expand(g, 2, 2))


def test_substitute_examples():
    assert substitute(Implies(p0, p1), {0: FALSUM}) is Implies(FALSUM, p1)
    assert substitute(dia(p0), {0: conj(p0, p1)}) is dia(conj(p0, p1))
    assert substitute(p0, {}) is p0


def test_substitution_is_simultaneous():
    assert substitute(Implies(p0, p1), {0: p1, 1: p0}) is Implies(p1, p0)


def test_subformulas_and_variables():
    assert subformulas(Implies(p0, FALSUM)) == {Implies(p0, FALSUM), p0, FALSUM}
    assert variables(Diamond(0, Var(2))) == {2}
    assert variables(FALSUM) == set()


def test_dag_and_tree_size():
    f = conj(p0, p0)
    # conj(p0, p0) = ((p0 -> (p0 -> F)) -> F)
    assert tree_size(f) == 7
    assert dag_size(f) == 5
    shared = p0
    for _ in range(30):
        shared = Implies(shared, shared)
    assert dag_size(shared) == 31
    assert tree_size(shared) == 2 ** 31 - 1


@given(formulas(n=2))
def test_pickle_round_trip_preserves_identity(f):
    assert pickle.loads(pickle.dumps(f)) is f


def test_max_var_and_depth_attributes():
    f = Implies(dia(Var(3)), box(dia(p1)))
    assert f.max_var == 3
    assert f.depth == 2
    assert FALSUM.max_var == -1
