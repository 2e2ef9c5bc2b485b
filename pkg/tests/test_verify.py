import json

from modalheight import verify as V
from modalheight.algebra import canonical_model
from modalheight.decision import decide, decide_height_bounded
from modalheight.formula import neg
from modalheight.frames import depths, height
from modalheight.schemes import jankov_fine_beta, top_part
from modalheight.formula import TOP, Var
from modalheight.frames import chain_preorder
from modalheight.generate import all_frames, formula_batch


def test_report_json_round_trip_is_byte_identical():
    report = V.verify_k5(count=20, seed=4)
    report.failures.append({"input": "x", "expected": 1, "actual": 2})
    report.failures.insert(0, {"input": "a", "expected": True, "actual": False})
    text = report.dumps()
    again = V.VerificationReport.from_json(json.loads(text))
    assert again.dumps() == text
    assert not again.passed
    assert "FAIL" in again.summary()


def test_check_counts_cases():
    r = V.VerificationReport("demo")
    assert r.check("a", 1, 1)
    assert not r.check("b", 1, 2)
    assert r.cases == 2 and r.failures == [{"input": "b", "expected": 1, "actual": 2}]


def test_small_bh_suite():
    r = V.verify_bh(list(all_frames(2)) + list(all_frames(1, n=2)))
    assert r.passed and r.cases == 4 * (16 + 4)


def test_bh_suite_detects_wrong_height(monkeypatch):
    monkeypatch.setattr(V, "height", lambda fr: 1)
    r = V.verify_bh(list(all_frames(2)), hs=(1,))
    assert not r.passed


def test_small_suites_pass():
    assert V.verify_k5(count=30).passed
    assert V.verify_truth_lemma(V.truth_lemma_corpus(max_worlds=2, ks=(1,))).passed
    assert V.verify_topheavy(V.suite_logic("chain3"), 1).passed
    L = V.suite_logic("chain3")
    assert V.verify_main(L, 1, 1, formula_batch(1, 2, 100)).passed
    fs = formula_batch(1, 2, 12)
    assert V.verify_embedd(L, 1, [(a, b) for a in fs for b in fs]).passed
    assert V.verify_s4s5(count=30).passed
    assert V.verify_fmp(count=20).passed
    assert V.verify_heavy(V.truth_lemma_corpus(max_worlds=2, ks=(1,))).passed
    assert V.verify_section5(range(6, 8), range(4, 7)).passed
    assert V.verify_s4_sound(count=20, preorders=30).passed


def separating_formulas(L, k, h):
    """Negated Jankov-Fine formulas of canonical points deeper than h: theorems
    of L[h] but not of L."""
    M = canonical_model(L, k)
    T = top_part(M, height(M.frame))
    d = depths(M.frame)
    return [neg(jankov_fine_beta(T, a)) for a in range(len(T)) if d[T.source[a]] > h]


def test_separating_formulas_separate():
    L = V.suite_logic("chain3")
    fs = separating_formulas(L, 1, 2)
    assert fs
    for f in fs:
        assert decide_height_bounded(L, 2, f, k=1).valid and not decide(L, f, k=1).valid


def test_main_suite_detects_a_broken_translation(monkeypatch):
    monkeypatch.setattr(V, "main_translation", lambda f, B: f)
    L = V.suite_logic("chain3")
    assert not V.verify_main(L, 1, 0, formula_batch(1, 2, 2000)).passed
    assert not V.verify_main(L, 1, 1, separating_formulas(L, 1, 2)).passed


def test_main_suite_passes_on_separating_formulas():
    L = V.suite_logic("chain3")
    assert V.verify_main(L, 1, 1, separating_formulas(L, 1, 2)).passed
    assert V.verify_main(L, 1, 0, separating_formulas(L, 1, 1)).passed


def test_main_suite_detects_wrong_depth_formulas(monkeypatch):
    real = V.depth_formulas

    def shifted(M, h, **kw):
        D = real(M, h, **kw)
        return type(D)(**{**D.__dict__, "B": (D.B[0],) + (TOP,) * (len(D.B) - 1)})

    monkeypatch.setattr(V, "depth_formulas", shifted)
    r = V.verify_main(V.suite_logic("chain3"), 1, 1, formula_batch(1, 2, 200))
    assert not r.passed


def test_s4s5_detects_wrong_translation(monkeypatch):
    monkeypatch.setattr(V, "glivenko_h1", lambda f, m, n=1: f)
    assert not V.verify_s4s5(count=30).passed


def test_seeded_suites_are_deterministic():
    a = V.verify_s4s5(seed=7, count=40)
    b = V.verify_s4s5(seed=7, count=40)
    assert a.cases == b.cases and a.notes == b.notes
    c = V.verify_fmp(count=30, seed=2)
    d = V.verify_fmp(count=30, seed=2)
    assert c.cases == d.cases and c.notes == d.notes


def test_main_rejects_h_beyond_height():
    import pytest
    with pytest.raises(ValueError):
        V.verify_main(V.suite_logic("chain2"), 1, 2, [Var(0)])


def test_alpha_formulas_isolate_points():
    alphas = V.alpha_formulas(4)
    assert len(alphas) == 4 and len(set(alphas)) == 4


def test_suite_logics_all_build():
    for name in V.SUITE_LOGICS:
        assert V.suite_logic(name).frames
    assert V.two_cluster_chain().worlds == 3
    assert chain_preorder(2).worlds == 2
