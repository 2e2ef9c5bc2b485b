"""Acceptance criteria, one test each.

Every test prints a single ``[criterion N] PASS|FAIL ...`` line (visible in
``pytest -v`` output) and asserts both the zero-failure condition and the
time limit.  Run directly with ``python tests/test_acceptance.py`` for the
summary lines alone.
"""
import random
import time

import pytest

from modalheight import verify as V
from modalheight.generate import formula_batch, random_formula

MAIN_LOGICS = ("chain3", "chain2")


def criterion_1():
    return [V.verify_bh(V.bh_corpus(max_worlds=4, random_count=200, random_max_worlds=6, max_n=2, seed=0),
                        hs=(0, 1, 2, 3), seed=0)]


def criterion_2():
    return [V.verify_k5(count=200, seed=0, max_worlds=6)]


def criterion_3():
    return [V.verify_truth_lemma(V.truth_lemma_corpus(max_worlds=3, ks=(0, 1)))]


def suite_models():
    for name in V.SUITE_LOGICS:
        for k in ((1,) if name == "s5-k1" else (1, 2)):
            yield name, V.suite_logic(name), k


def criterion_4():
    return [V.verify_topheavy(L, k, name=f"{name} k={k}") for name, L, k in suite_models()]


def criterion_5():
    reports = []
    rng = random.Random(0)
    randoms = [random_formula(rng, 2, 2) for _ in range(300)]
    enumerated = formula_batch(1, 2, 2000)
    for name in MAIN_LOGICS:
        L = V.suite_logic(name)
        reports.append(V.verify_main(L, 1, 1, enumerated, name=name))
        reports.append(V.verify_main(L, 2, 1, randoms, seed=0, name=name))
    return reports


def criterion_6():
    return [V.verify_s4s5(seed=0, count=300, k=2, depth=3)]


def criterion_7():
    return [V.verify_fmp(count=100, seed=0)]


def criterion_8():
    corpus = list(V.truth_lemma_corpus(max_worlds=3, ks=(0, 1))) + list(suite_models())
    return [V.verify_heavy(corpus)]


def criterion_9():
    return [V.verify_section5(alpha_range=range(6, 11), probe_range=range(4, 11), bound=8)]


def criterion_10():
    return [V.verify_s4_sound(seed=0, count=200, preorders=200, max_worlds=6)]


CRITERIA = {
    1: ("B_h holds exactly on frames of height <= h", criterion_1, 120),
    2: ("Euclidean frames are 2-transitive of height <= 2", criterion_2, 30),
    3: ("truth lemma and label soundness", criterion_3, 300),
    4: ("depth formulas, isolation, persistence, heaviness", criterion_4, 300),
    5: ("main translation equals L[h+1] on canonical models", criterion_5, 600),
    6: ("S5 backends agree with S4 on the diamond-box translation", criterion_6, 300),
    7: ("maximal-cluster witnesses for refuted translations", criterion_7, 60),
    8: ("canonical relation and heaviness, finite forms", criterion_8, 60),
    9: ("alpha isolation and truncated subalgebra sizes", criterion_9, 600),
    10: ("S4 with h=1, sound direction", criterion_10, 300),
}


def run(number):
    title, fn, limit = CRITERIA[number]
    start = time.perf_counter()
    reports = fn()
    elapsed = time.perf_counter() - start
    cases = sum(r.cases for r in reports)
    failures = sum(len(r.failures) for r in reports)
    ok = failures == 0 and elapsed < limit
    notes = "; ".join(f"{k}={v}" for r in reports for k, v in sorted(r.notes.items())
                      if k in ("max_subalgebra_size", "proven", "refuted", "s5_valid", "valid",
                                                                "built", "refused_over_cap", "sampled_over_cap"))
    line = (f"[criterion {number}] {'PASS' if ok else 'FAIL'} {title}: {cases} cases, "
            f"{failures} failures, {elapsed:.1f}s (limit {limit}s)" + (f" [{notes}]" if notes else ""))
    return ok, line, reports


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, line, reports = run(number)
    with capsys.disabled():
        print("\n" + line)
    for r in reports:
        assert r.passed, r.to_json()["failures"][:5]
    assert ok, line


if __name__ == "__main__":
    for n in sorted(CRITERIA):
        print(run(n)[1], flush=True)
