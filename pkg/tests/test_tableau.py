import itertools

import pytest
from hypothesis import given, settings

from modalheight.formula import FALSUM, TOP, Implies, Var, box, conj, dia, disj, neg
from modalheight.generate import all_frames, formula_batch
from modalheight.kripke import Frame, reach, truth_set
from modalheight.tableau import NAMED_LOGICS, find_model, prove

import oracles
from strategies import formulas

p, q = Var(0), Var(1)

AXIOMS = {
    "K-dist": Implies(box(Implies(p, q)), Implies(box(p), box(q))),
    "T": Implies(box(p), p),
    "4": Implies(box(p), box(box(p))),
    "B": Implies(p, box(dia(p))),
    "5": Implies(dia(p), box(dia(p))),
    "D": Implies(box(p), dia(p)),
}

EXPECTED = {
    "K": {"K-dist"},
    "T": {"K-dist", "T", "D"},
    "K4": {"K-dist", "4"},
    "S4": {"K-dist", "T", "4", "D"},
    "S5": {"K-dist", "T", "4", "B", "5", "D"},
}


@pytest.mark.parametrize("logic", sorted(NAMED_LOGICS))
@pytest.mark.parametrize("axiom", sorted(AXIOMS))
def test_standard_axioms(logic, axiom):
    assert prove(logic, AXIOMS[axiom]).valid == (axiom in EXPECTED[logic])


def test_trivial_cases():
    for logic in NAMED_LOGICS:
        assert prove(logic, TOP).valid
        assert not prove(logic, FALSUM).valid
        assert not prove(logic, p).valid


def frame_condition(logic, fr):
    reflexive, transitive = NAMED_LOGICS[logic]
    R = oracles.relation(fr, 0)
    if reflexive and any((x, x) not in R for x in range(fr.worlds)):
        return False
    if transitive and any((x, z) not in R for (x, y) in R for (y2, z) in R if y == y2):
        return False
    if logic == "S5" and any((y, x) not in R for (x, y) in R):
        return False
    return True


def small_frames(logic):
    return [fr for N in (1, 2, 3) for fr in all_frames(N) if frame_condition(logic, fr)]


def check_countermodel(logic, f):
    res = prove(logic, f)
    if res.valid:
        return True
    model = res.countermodel
    assert frame_condition(logic, model.frame)
    val = {j: set(i for i in range(model.frame.worlds) if model.valuation[j] >> i & 1)
           for j in range(len(model.valuation))}
    assert not oracles.holds(model.frame, val, f, res.world)
    return False


@pytest.mark.parametrize("logic", sorted(NAMED_LOGICS))
def test_refuted_on_small_frames_means_not_provable(logic):
    frames = small_frames(logic)
    for f in formula_batch(1, 2, 250):
        provable = check_countermodel(logic, f)
        if any(not oracles.frame_validates(fr, f) for fr in frames):
            assert not provable, f


@pytest.mark.parametrize("logic", sorted(NAMED_LOGICS))
@settings(max_examples=60, deadline=None)
@given(f=formulas(k=2, n=1, max_leaves=6))
def test_countermodels_are_genuine(logic, f):
    check_countermodel(logic, f)


@settings(max_examples=80, deadline=None)
@given(f=formulas(k=2, n=1, max_leaves=6))
def test_inclusions_between_logics(f):
    verdicts = {name: prove(name, f).valid for name in NAMED_LOGICS}
    for weaker, stronger in [("K", "T"), ("K", "K4"), ("T", "S4"), ("K4", "S4"), ("S4", "S5")]:
        if verdicts[weaker]:
            assert verdicts[stronger]


def test_s5_agrees_with_clusters():
    clusters = [Frame.unimodal(s, list(itertools.product(range(s), repeat=2))) for s in range(1, 5)]
    for f in formula_batch(2, 2, 400):
        valid = prove("S5", f).valid
        assert valid == all(oracles.frame_validates(c, f) for c in clusters), f


def test_s4_needs_loop_check():
    # []<>p -> <>[]p is not an S4 theorem; the countermodel needs a cycle or an infinite branch
    f = Implies(box(dia(p)), dia(box(p)))
    assert not check_countermodel("S4", f)
    # Grzegorczyk's axiom fails on a two-world cluster, and the search must still terminate
    grz = Implies(box(Implies(box(Implies(p, box(p))), p)), p)
    assert not check_countermodel("S4", grz)


def test_find_model_returns_satisfying_world():
    f = conj(dia(p), dia(neg(p)))
    for logic in NAMED_LOGICS:
        model, world = find_model(logic, f)
        assert truth_set(model, f) >> world & 1
    assert find_model("S4", conj(p, neg(p))) is None


def test_unknown_logic():
    with pytest.raises(ValueError):
        prove("GL", p)


def test_countermodel_frames_are_closed():
    res = prove("K4", Implies(dia(p), dia(dia(p))))
    assert not res.valid
    fr = res.countermodel.frame
    assert reach(fr) is not None and frame_condition("K4", fr)
    assert prove("S4", Implies(dia(dia(p)), dia(p))).valid
    assert prove("T", disj(p, Implies(p, dia(p)))).valid
