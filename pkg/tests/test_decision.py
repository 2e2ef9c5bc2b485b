import random
import threading
from concurrent.futures import ThreadPoolExecutor

import pytest

import oracles
from modalheight import algebra, decision
from modalheight.algebra import FrameClassLogic
from modalheight.decision import (CanonicalCache, LogicSpec, UnsupportedLogic, Verdict, decide,
                                  decide_height_bounded, fmp_transfer_witness, s5_frame_class)
from modalheight.formula import FALSUM, TOP, Implies, Var, box, box_le, dia, dia_le, disj, neg
from modalheight.frames import chain_preorder, cluster_frame, height
from modalheight.generate import formula_batch, random_formula
from modalheight.kripke import Frame, Model, truth_set
from modalheight.schemes import embedd_pair, glivenko_h1
from modalheight.tableau import prove

p, q = Var(0), Var(1)
irreflexive_point = Frame.unimodal(1, [])


def test_named_examples():
    assert decide("s4", Implies(box(p), box(box(p)))).valid
    v = decide("S4", Implies(p, box(dia(p))))
    assert not v.valid
    assert not truth_set(v.countermodel, Implies(p, box(dia(p)))) >> v.world & 1
    assert decide(LogicSpec.named("s4", 1), Implies(p, box(dia(p)))).valid


def test_named_height_other_than_s4_1_is_rejected():
    with pytest.raises(UnsupportedLogic):
        decide(LogicSpec.named("S4", 2), p)
    with pytest.raises(UnsupportedLogic):
        decide(LogicSpec.named("K", 1), p)


def test_logic_spec_validation():
    with pytest.raises(ValueError):
        LogicSpec()
    with pytest.raises(ValueError):
        LogicSpec(name="S4", frames=FrameClassLogic((chain_preorder(1),)))
    with pytest.raises(UnsupportedLogic):
        LogicSpec.named("GL")
    with pytest.raises(ValueError):
        LogicSpec.named("S4", 0)
    assert LogicSpec.named("k4").name == "K4"


def test_verdict_invariant():
    with pytest.raises(ValueError):
        Verdict(True, Model(irreflexive_point, ()), 0)
    with pytest.raises(ValueError):
        Verdict(False)
    assert Verdict(True).to_json() == {"valid": True}


def test_frame_class_decision_matches_brute_force():
    frames = (chain_preorder(2), irreflexive_point)
    L = FrameClassLogic(frames)
    for f in formula_batch(2, 2, 300):
        expected = all(oracles.frame_validates(fr, f) for fr in frames)
        v = decide(L, f, cache=None)
        assert v.valid == expected, f
        if not v.valid:
            assert not truth_set(v.countermodel, f) >> v.world & 1


def test_frame_class_decision_rejects_foreign_modality():
    with pytest.raises(ValueError):
        decide(FrameClassLogic((chain_preorder(2),)), dia(p, 1), cache=None)


def test_k_below_formula_variables():
    with pytest.raises(ValueError):
        decide(FrameClassLogic((chain_preorder(2),)), q, k=1, cache=None)


def test_height_bounded_examples():
    L = FrameClassLogic((chain_preorder(3),))
    b1 = Implies(p, box_le(L.m, dia_le(L.m, p)))
    assert not decide(L, b1, cache=None).valid
    assert decide_height_bounded(L, 1, b1).valid
    assert decide(LogicSpec(frames=L, height=1), b1).valid
    with pytest.raises(ValueError):
        decide_height_bounded(L, 0, p)


def test_height_bound_at_or_above_height_changes_nothing():
    L = FrameClassLogic((chain_preorder(2), cluster_frame(2)))
    for f in formula_batch(1, 2, 200):
        base = decide(L, f).valid
        for h in (2, 3):
            assert decide_height_bounded(L, h, f).valid == base


def test_height_one_part_is_glivenko_equivalent():
    # L[1] |- f  iff  L |- <>*[]*f, checked for every 1-variable formula of depth <= 2
    for frames in [(chain_preorder(3),), (chain_preorder(2), irreflexive_point),
                   (Frame.unimodal(3, [(0, 1), (0, 2), (1, 2), (2, 1), (1, 1), (2, 2)]),)]:
        L = FrameClassLogic(frames)
        for f in formula_batch(1, 2, 150):
            assert decide_height_bounded(L, 1, f, k=1).valid == decide(L, glivenko_h1(f, L.m), k=1).valid


def test_embedd_correspondence_exhaustive():
    L = FrameClassLogic((chain_preorder(2),))
    fs = formula_batch(1, 2, 40)
    for psi in fs[:15]:
        for f in fs:
            boxed, translated = embedd_pair(psi, f, L.m)
            assert decide_height_bounded(L, 1, boxed, k=1).valid == decide(L, translated, k=1).valid


def test_fmp_witness_has_height_one_and_refutes():
    L = FrameClassLogic((chain_preorder(3), irreflexive_point))
    rng = random.Random(3)
    seen = 0
    for _ in range(80):
        f = random_formula(rng, 1, 2)
        try:
            model, world = fmp_transfer_witness(L, f)
        except ValueError:
            assert decide(L, glivenko_h1(f, L.m), k=1).valid
            continue
        seen += 1
        assert height(model.frame) == 1
        assert not truth_set(model, f) >> world & 1
    assert seen > 0


def test_fmp_raises_on_valid_translation():
    with pytest.raises(ValueError):
        fmp_transfer_witness(FrameClassLogic((chain_preorder(2),)), TOP)


def test_s5_frame_class_agrees_with_tableau():
    for k in (1, 2):
        L = s5_frame_class(k)
        for f in formula_batch(k, 2, 150):
            assert decide(L, f, k=k).valid == prove("S5", f).valid, f


def test_cache_builds_each_key_once(monkeypatch):
    calls = []
    lock = threading.Lock()
    real = algebra.canonical_model

    def counting(logic, k, bit_budget=algebra.DEFAULT_BIT_BUDGET):
        with lock:
            calls.append(k)
        return real(logic, k, bit_budget)

    monkeypatch.setattr(decision, "canonical_model", counting)
    cache = CanonicalCache()
    L = FrameClassLogic((chain_preorder(3),))
    with ThreadPoolExecutor(8) as pool:
        models = list(pool.map(lambda _: cache.get(L, 2), range(32)))
    assert calls == [2]
    assert all(M is models[0] for M in models)
    assert len(cache) == 1
    cache.clear()
    assert len(cache) == 0


def test_decide_uses_cache_consistently():
    cache = CanonicalCache()
    L = FrameClassLogic((chain_preorder(2),))
    f = disj(p, neg(p))
    assert decide(L, f, cache=cache).valid
    assert decide(L, FALSUM, k=1, cache=cache).valid is False
    assert len(cache) == 1
