"""Verification suites.

Each suite runs a family of exact checks and returns a
``VerificationReport``.  Randomised suites take an explicit seed and draw
everything from one ``random.Random``.
"""
from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Sequence

from .algebra import DEFAULT_CAP, FrameClassLogic, canonical_model, free_algebra, subalgebra_size_probe
from .decision import (decide, decide_height_bounded, fmp_transfer_witness,
                       s5_frame_class)
from .formula import FALSUM, Formula, Implies, Var, box_le, conj, dia, disj, neg
from .frames import (chain_preorder, cluster_frame, depths, height, is_h_heavy,
                     neighbor_exclusion_frame, omega_top_frame, random_frame,
                     transitivity_degree)
from .generate import (all_frames, enumerate_formulas, random_euclidean_frame,
                       random_formula, random_preorder)
from .kripke import Evaluator, Frame, Model, bits, frame_validates, mask_of, reach, truth_set
from .parser import pretty
from .schemes import (bh_instance, depth_formulas, embedd_pair, gamma, glivenko_h1,
                      jankov_fine_beta, main_translation)

__all__ = [
    "VerificationReport", "SUITE_LOGICS", "suite_logic", "two_cluster_chain",
    "bh_corpus", "verify_bh", "verify_k5", "truth_lemma_corpus", "verify_truth_lemma",
    "verify_topheavy", "verify_main", "verify_embedd", "verify_s4s5", "verify_fmp",
    "verify_heavy", "alpha_formulas", "verify_section5", "verify_s4_sound",
]


@dataclass
class VerificationReport:
    suite: str
    cases: int = 0
    failures: list[dict] = field(default_factory=list)
    seed: int | None = None
    wall_time: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, inputs: str, expected: Any, actual: Any) -> bool:
        self.cases += 1
        if expected != actual:
            self.failures.append({"input": inputs, "expected": expected, "actual": actual})
            return False
        return True

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "cases": self.cases,
            "failures": sorted(self.failures, key=lambda f: json.dumps(f, sort_keys=True)),
            "passed": self.passed,
            "seed": self.seed,
            "wall_time": self.wall_time,
            "notes": self.notes,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, data: dict) -> "VerificationReport":
        return cls(data["suite"], data["cases"], list(data["failures"]), data["seed"],
                   data["wall_time"], dict(data["notes"]))

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.suite}: {status} ({self.cases} cases, {len(self.failures)} failures, {self.wall_time:.1f}s)"


class _Timer:
    def __init__(self, report: VerificationReport):
        self.report = report

    def __enter__(self):
        self.start = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.wall_time = round(time.perf_counter() - self.start, 3)
        return False


def _frame_text(fr: Frame) -> str:
    return json.dumps(fr.to_json(), sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------- corpus

def two_cluster_chain() -> Frame:
    """Preorder with the cluster ``{0, 1}`` below the cluster ``{2}``."""
    return Frame.unimodal(3, [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (1, 2), (2, 2)])


def _irreflexive_point() -> Frame:
    return Frame.unimodal(1, [])


def _bimodal_frame() -> Frame:
    # 0 -R0-> 1 -R1-> 2, with a R1 loop at 2; the union is 2-transitive
    return Frame.from_pairs(3, [[(0, 1)], [(1, 2), (2, 2)]])


def _euclidean_example() -> Frame:
    return Frame.unimodal(3, [(0, 1), (0, 2), (1, 2), (2, 1), (1, 1), (2, 2)])


SUITE_LOGICS: dict[str, tuple[Frame, ...]] = {
    "reflexive-point": (cluster_frame(1),),
    "irreflexive-point": (_irreflexive_point(),),
    "chain2": (chain_preorder(2),),
    "chain3": (chain_preorder(3),),
    "cluster-chain+irreflexive": (two_cluster_chain(), _irreflexive_point()),
    "s5-k1": tuple(cluster_frame(s) for s in (1, 2)),
    "euclidean": (_euclidean_example(),),
    "bimodal": (_bimodal_frame(),),
}


def suite_logic(name: str) -> FrameClassLogic:
    return FrameClassLogic(SUITE_LOGICS[name])


def bh_corpus(max_worlds: int = 4, random_count: int = 200, random_max_worlds: int = 6,
              max_n: int = 2, seed: int = 0) -> Iterator[Frame]:
    """Every unimodal frame with at most ``max_worlds`` worlds, then seeded random
    frames with at most ``random_max_worlds`` worlds and ``1..max_n`` relations."""
    for N in range(1, max_worlds + 1):
        yield from all_frames(N)
    rng = random.Random(seed)
    for _ in range(random_count):
        N = rng.randint(1, random_max_worlds)
        n = rng.randint(1, max_n)
        yield random_frame(N, n, rng.choice((0.2, 0.35, 0.5)), rng=rng)


# ---------------------------------------------------------------- suites

def verify_bh(frames: Iterable[Frame], hs: Sequence[int] = (0, 1, 2, 3), seed: int | None = None) -> VerificationReport:
    """``F ⊨ B_h`` iff ``height(F) ≤ h``, with ``B_h`` over fresh variables ``p_1..p_h``."""
    report = VerificationReport("bh", seed=seed)
    schemes: dict[tuple[int, int, int], Formula] = {}
    with _Timer(report):
        frames_seen = 0
        for fr in frames:
            frames_seen += 1
            m = transitivity_degree(fr)
            H = height(fr)
            for h in hs:
                key = (h, m, fr.n)
                if key not in schemes:
                    schemes[key] = bh_instance(h, [Var(j + 1) for j in range(h)], m, fr.n)
                ok = frame_validates(fr, schemes[key])
                report.check(f"h={h} frame={_frame_text(fr)}" if ok != (H <= h) else "", H <= h, ok)
        report.notes["frames"] = frames_seen
    return report


def verify_k5(count: int = 200, seed: int = 0, max_worlds: int = 6) -> VerificationReport:
    """Random Euclidean frames are 2-transitive and have height at most 2."""
    report = VerificationReport("k5", seed=seed)
    rng = random.Random(seed)
    with _Timer(report):
        for _ in range(count):
            fr = random_euclidean_frame(rng, max_worlds)
            report.check(f"frame={_frame_text(fr)}", True,
                         transitivity_degree(fr) <= 2 and height(fr) <= 2)
    return report


def truth_lemma_corpus(max_worlds: int = 3, ks: Sequence[int] = (0, 1)) -> Iterator[tuple[str, FrameClassLogic, int]]:
    """Every single frame with at most ``max_worlds`` worlds, plus three
    curated two-frame classes, each with every ``k`` in ``ks``."""
    curated = {
        "cluster-chain+irreflexive": (two_cluster_chain(), _irreflexive_point()),
        "reflexive+irreflexive": (cluster_frame(1), _irreflexive_point()),
        "chain2+cluster2": (chain_preorder(2), cluster_frame(2)),
    }
    for N in range(1, max_worlds + 1):
        for fr in all_frames(N):
            for k in ks:
                yield _frame_text(fr), FrameClassLogic((fr,)), k
    for name, frames in curated.items():
        for k in ks:
            yield name, FrameClassLogic(frames), k


def verify_truth_lemma(logics: Iterable[tuple[str, FrameClassLogic, int]], cap: int = DEFAULT_CAP,
                       sample: int = 200, seed: int = 0) -> VerificationReport:
    """``truth_set(dual, label(e)) = {a : a ≤ e}`` for every element ``e``.

    Algebras with more than ``cap`` elements are too large to enumerate; for
    those every atom label is checked together with ``sample`` seeded random
    elements, and the counts are recorded in the notes.
    """
    report = VerificationReport("truth-lemma", seed=seed)
    rng = random.Random(seed)
    built = refused = atom_checks = sampled = 0
    with _Timer(report):
        for name, logic, k in logics:
            A = free_algebra(logic, k)
            M = canonical_model(logic, k)
            ev = Evaluator(M.model)
            if A.size > cap:
                refused += 1
                for a, label in enumerate(A.atom_labels):
                    atom_checks += 1
                    report.check(f"{name} k={k} atom {a}", 1 << a, ev(label))
                atoms = len(A.atom_labels)
                for _ in range(sample):
                    below = [a for a in range(atoms) if rng.random() < 0.5]
                    e = A.element(below)
                    sampled += 1
                    report.check(f"{name} k={k} element {e:#x}", below, bits(ev(A.label(e))))
                continue
            built += 1
            for (e, below), (_, label) in zip(A.elements_with_atoms(cap), A.elements(cap)):
                want = mask_of(below)
                got = ev(label)
                if got != want:
                    report.check(f"{name} k={k} element {e:#x}", bits(want), bits(got))
                else:
                    report.cases += 1
        report.notes.update(built=built, refused_over_cap=refused, atom_checks_over_cap=atom_checks,
                            sampled_over_cap=sampled, cap=cap)
    return report


def verify_topheavy(logic: FrameClassLogic, k: int, h: int | None = None, name: str = "") -> VerificationReport:
    """Depth formulas, Jankov-Fine isolation, γ persistence and heaviness
    on the k-canonical model of ``logic``."""
    report = VerificationReport("topheavy")
    tag = f"{name} k={k}"
    with _Timer(report):
        M = canonical_model(logic, k)
        fr = M.frame
        H = height(fr)
        h = H if h is None else h
        if not 1 <= h <= H:
            raise ValueError(f"h must lie in 1..{H}")
        d = depths(fr)
        ev = Evaluator(M.model)
        D = depth_formulas(M, h)
        T = D.top
        previous = 0
        for i, B in enumerate(D.B):
            got = ev(B)
            report.check(f"{tag} B[{i}] depth set", bits(mask_of(x for x in range(len(M)) if d[x] <= i)), bits(got))
            report.check(f"{tag} B[{i}] monotone", True, previous & ~got == 0)
            previous = got
        g = gamma(T)
        g_set = ev(g)
        for i in range(fr.n):
            closed = all(fr.succ[i][x] & ~g_set == 0 for x in bits(g_set))
            report.check(f"{tag} gamma persistent under R{i}", True, closed)
        top_ev = Evaluator(T.model)
        for a in range(len(T)):
            beta = jankov_fine_beta(T, a, _gamma=g)
            report.check(f"{tag} beta({T.source[a]}) in canonical model", [T.source[a]], bits(ev(beta)))
            report.check(f"{tag} beta({T.source[a]}) in top part", [a], bits(top_ev(beta)))
        for j in range(1, H + 1):
            report.check(f"{tag} {j}-heavy", True, is_h_heavy(fr, j))
        report.notes.update(atoms=len(M), height=H, h=h, top_atoms=len(T))
    return report


def verify_main(logic: FrameClassLogic, k: int, h: int, formulas: Iterable[Formula],
                seed: int | None = None, name: str = "") -> VerificationReport:
    """``L[h+1] ⊢ φ`` iff ``L ⊢ main_translation(φ)``, both decided on the k-canonical model."""
    report = VerificationReport("main", seed=seed)
    with _Timer(report):
        M = canonical_model(logic, k)
        H = height(M.frame)
        if not 0 <= h < H:
            raise ValueError(f"need h+1 <= {H}, the height of the canonical frame")
        B = depth_formulas(M, h)
        valid = 0
        for f in formulas:
            lhs = decide_height_bounded(logic, h + 1, f, k=k).valid
            rhs = decide(logic, main_translation(f, B), k=k).valid
            report.check(f"{name} h={h} {pretty(f)}", lhs, rhs)
            valid += lhs
        report.notes.update(atoms=len(M), height=H, k=k, h=h, valid=valid)
    return report


def verify_embedd(logic: FrameClassLogic, k: int, pairs: Iterable[tuple[Formula, Formula]],
                  seed: int | None = None, name: str = "") -> VerificationReport:
    """``L[1] ⊢ □*ψ → □*φ`` iff ``L ⊢ ◇*□*ψ → ◇*□*φ``."""
    report = VerificationReport("embedd", seed=seed)
    with _Timer(report):
        for psi, f in pairs:
            boxed, translated = embedd_pair(psi, f, logic.m, logic.n)
            lhs = decide_height_bounded(logic, 1, boxed, k=k).valid
            rhs = decide(logic, translated, k=k).valid
            report.check(f"{name} psi={pretty(psi)} phi={pretty(f)}", lhs, rhs)
    return report


def verify_s4s5(seed: int = 0, count: int = 300, k: int = 2, depth: int = 3) -> VerificationReport:
    """S5 (tableau and frame-class backend) against the S4 tableau on ``◇□φ``,
    and the pair form ``□ψ → □φ`` against ``◇□ψ → ◇□φ``."""
    report = VerificationReport("s4s5", seed=seed)
    rng = random.Random(seed)
    s5_class = s5_frame_class(k)
    fixed = [Implies(Var(0), box_le(1, dia(Var(0)))), FALSUM]
    with _Timer(report):
        formulas = fixed + [random_formula(rng, k, depth) for _ in range(count)]
        valid = 0
        for f in formulas:
            text = pretty(f)
            s5 = decide("S5", f).valid
            valid += s5
            s5_fc = decide(s5_class, f, k=k).valid
            s4 = decide("S4", glivenko_h1(f, 1)).valid
            report.check(f"S5 backends agree on {text}", s5, s5_fc)
            report.check(f"S5 vs S4 diamond-box on {text}", s5, s4)
        for _ in range(count // 3):
            psi, f = random_formula(rng, k, depth - 1), random_formula(rng, k, depth - 1)
            boxed, translated = embedd_pair(psi, f, 1)
            report.check(f"pair psi={pretty(psi)} phi={pretty(f)}",
                         decide("S5", boxed).valid, decide("S4", translated).valid)
        report.notes.update(formulas=len(formulas), s5_valid=valid)
    return report


def verify_fmp(count: int = 100, seed: int = 0, max_worlds: int = 3) -> VerificationReport:
    """Maximal-cluster witnesses for refuted translations: height 1, validate
    ``B_1``, and refute the formula."""
    report = VerificationReport("fmp", seed=seed)
    rng = random.Random(seed)
    refuted = skipped = 0
    with _Timer(report):
        while refuted < count:
            frames = tuple(random_frame(rng.randint(1, max_worlds), 1, rng.choice((0.3, 0.5, 0.7)), rng=rng)
                           for _ in range(rng.randint(1, 2)))
            L = FrameClassLogic(frames)
            f = random_formula(rng, 1, 2)
            if decide(L, glivenko_h1(f, L.m, L.n), k=1).valid:
                skipped += 1
                continue
            refuted += 1
            model, world = fmp_transfer_witness(L, f)
            text = f"{pretty(f)} in Log({', '.join(_frame_text(x) for x in frames)})"
            report.check(f"height 1: {text}", 1, height(model.frame))
            report.check(f"validates B_1: {text}", True,
                         frame_validates(model.frame, bh_instance(1, [Var(1)], L.m, L.n)))
            report.check(f"refutes: {text}", 0, truth_set(model, f) >> world & 1)
        report.notes.update(refuted=refuted, skipped_valid=skipped)
    return report


def verify_heavy(logics: Iterable[tuple[str, FrameClassLogic, int]], element_limit: int = 256) -> VerificationReport:
    """``a R* b`` iff ``a ≤ ◇^{≤m} b`` in the algebra, plus 1-heaviness and
    ``(h+1)``-heaviness below the height of every canonical frame.

    For algebras with at most ``element_limit`` elements the ``R*`` criterion
    is also checked in its quantified form, over every element above ``b``.
    """
    report = VerificationReport("heavy")
    models = 0
    with _Timer(report):
        for name, logic, k in logics:
            models += 1
            M = canonical_model(logic, k)
            A, fr, m = M.algebra, M.frame, logic.m
            star = reach(fr)
            up = [A.dia_le(m, a) for a in A.atoms]
            for a, amask in enumerate(A.atoms):
                for b in range(len(A.atoms)):
                    algebraic = amask & up[b] == amask
                    if algebraic != bool(star[a] >> b & 1):
                        report.check(f"{name} k={k} R*({a},{b})", bool(star[a] >> b & 1), algebraic)
                    else:
                        report.cases += 1
            if A.size <= element_limit:
                lifted = [(below, A.dia_le(m, e)) for e, below in A.elements_with_atoms()]
                for a, amask in enumerate(A.atoms):
                    for b in range(len(A.atoms)):
                        quantified = all(amask & img == amask for below, img in lifted if b in below)
                        report.check(f"{name} k={k} quantified R*({a},{b})", bool(star[a] >> b & 1), quantified)
            H = height(fr)
            report.check(f"{name} k={k} 1-heavy", True, is_h_heavy(fr, 1))
            for j in range(2, H + 1):
                report.check(f"{name} k={k} {j}-heavy", True, is_h_heavy(fr, j))
        report.notes["models"] = models
    return report


def alpha_formulas(count: int) -> list[Formula]:
    """``α_0 = p_0 ∧ ◇¬p_0``, ``α_1 = ¬◇α_0 ∧ ¬p_0``,
    ``α_{i+1} = ¬(◇α_i ∨ α_{i-1}) ∧ ¬p_0``."""
    p = Var(0)
    alphas = [conj(p, dia(neg(p)))]
    if count > 1:
        alphas.append(conj(neg(dia(alphas[0])), neg(p)))
    while len(alphas) < count:
        alphas.append(conj(neg(disj(dia(alphas[-1]), alphas[-2])), neg(p)))
    return alphas[:count]


def verify_section5(alpha_range: Iterable[int] = range(6, 11), probe_range: Iterable[int] = range(4, 11),
                    bound: int = 8, cap: int = DEFAULT_CAP) -> VerificationReport:
    """α_i isolates point ``i`` of the neighbour-exclusion frame (``i ≤ N-3``), and
    every 1-generated subalgebra of the truncated ω-frame is small."""
    report = VerificationReport("section5")
    with _Timer(report):
        for N in alpha_range:
            fr = neighbor_exclusion_frame(N)
            model = Model(fr, (mask_of([0, N]),))
            ev = Evaluator(model)
            for i, alpha in enumerate(alpha_formulas(N - 2)):
                report.check(f"N={N} alpha_{i}", [i], bits(ev(alpha)))
        sizes = {}
        for N in probe_range:
            fr = omega_top_frame(N)
            largest = max(subalgebra_size_probe(fr, [g], cap) for g in range(1 << fr.worlds))
            sizes[str(N)] = largest
            report.check(f"N={N} largest 1-generated subalgebra <= {bound}", True, largest <= bound)
        report.notes["max_subalgebra_size"] = sizes
    return report


def verify_s4_sound(seed: int = 0, count: int = 200, preorders: int = 200,
                    max_worlds: int = 6) -> VerificationReport:
    """Sound direction of the S4 case with ``h = 1``: if the S4 tableau proves
    the main translation built from the S5 1-canonical model, then ``φ``
    holds on random preorders of height at most 2."""
    report = VerificationReport("s4-sound", seed=seed)
    rng = random.Random(seed)
    with _Timer(report):
        M = canonical_model(s5_frame_class(1), 1)
        B = depth_formulas(M, 1)
        frames = [random_preorder(rng, max_worlds, 2) for _ in range(preorders)]
        formulas = list(enumerate_formulas(1, 2, count=count // 2))
        formulas += [random_formula(rng, 1, 2) for _ in range(count - len(formulas))]
        proven = 0
        for f in formulas:
            if not decide("S4", main_translation(f, B)).valid:
                continue
            proven += 1
            bad = next((fr for fr in frames if not frame_validates(fr, f)), None)
            report.check(f"{pretty(f)}", None, None if bad is None else _frame_text(bad))
        report.notes.update(formulas=len(formulas), proven=proven, preorders=preorders)
    return report
