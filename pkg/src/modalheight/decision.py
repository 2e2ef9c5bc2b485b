"""Validity checking.

Named logics (K, T, K4, S4, S5) go to the tableau provers.  Frame-class
logics are decided exactly on their finite k-canonical model: a k-formula
is a theorem iff it holds at every atom.  ``L[h]`` is decided on the
depth-``≤ h`` part of the same canonical model.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass

from .algebra import DEFAULT_BIT_BUDGET, CanonicalModel, FrameClassLogic, canonical_model
from .formula import Formula, modalities
from .frames import maximal_elements, top_restriction
from .kripke import Frame, Model, bits, mask_of, reach, truth_set
from .schemes import glivenko_h1
from .tableau import NAMED_LOGICS, prove

__all__ = [
    "LogicSpec", "Verdict", "UnsupportedLogic", "decide", "decide_height_bounded",
    "fmp_transfer_witness", "CanonicalCache", "default_cache", "s5_frame_class",
]


class UnsupportedLogic(ValueError):
    pass


@dataclass(frozen=True)
class LogicSpec:
    """A named logic or a frame-class logic, optionally extended by ``B_height``."""

    name: str | None = None
    frames: FrameClassLogic | None = None
    height: int | None = None

    def __post_init__(self):
        if (self.name is None) == (self.frames is None):
            raise ValueError("give exactly one of a logic name or a frame class")
        if self.name is not None:
            object.__setattr__(self, "name", self.name.upper())
            if self.name not in NAMED_LOGICS:
                raise UnsupportedLogic(f"unknown logic {self.name!r}")
        if self.height is not None and self.height < 1:
            raise ValueError("height bound must be at least 1")

    @classmethod
    def named(cls, name: str, height: int | None = None) -> "LogicSpec":
        return cls(name=name, height=height)

    @classmethod
    def of_frames(cls, *frames: Frame, height: int | None = None) -> "LogicSpec":
        return cls(frames=FrameClassLogic(tuple(frames)), height=height)


@dataclass(frozen=True)
class Verdict:
    valid: bool
    countermodel: Model | None = None
    world: int | None = None

    def __post_init__(self):
        if self.valid != (self.countermodel is None):
            raise ValueError("a verdict carries a countermodel exactly when it is 'not valid'")

    def to_json(self) -> dict:
        out: dict = {"valid": self.valid}
        if self.countermodel is not None:
            out["countermodel"] = self.countermodel.to_json()
            out["world"] = self.world
        return out


class CanonicalCache:
    """Get-or-build map of canonical models keyed by (frame-class fingerprint, k).

    Concurrent requests for one key build it once; the others wait.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._models: dict[tuple[str, int], CanonicalModel] = {}
        self._building: dict[tuple[str, int], threading.Lock] = {}

    def get(self, logic: FrameClassLogic, k: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> CanonicalModel:
        key = (logic.fingerprint, k)
        with self._lock:
            if key in self._models:
                return self._models[key]
            build_lock = self._building.setdefault(key, threading.Lock())
        with build_lock:
            with self._lock:
                if key in self._models:
                    return self._models[key]
            M = canonical_model(logic, k, bit_budget)
            with self._lock:
                self._models[key] = M
                self._building.pop(key, None)
            return M

    def clear(self) -> None:
        with self._lock:
            self._models.clear()

    def __len__(self) -> int:
        return len(self._models)


default_cache = CanonicalCache()


def _check_model(model: Model, f: Formula, world: int) -> None:
    if truth_set(model, f) >> world & 1:
        raise AssertionError("internal error: countermodel does not refute the formula")


def _as_frame_class(logic) -> FrameClassLogic:
    if isinstance(logic, FrameClassLogic):
        return logic
    if isinstance(logic, LogicSpec) and logic.frames is not None:
        return logic.frames
    raise TypeError("expected a frame-class logic")


def _canonical(L: FrameClassLogic, f: Formula, k: int | None, cache: CanonicalCache | None,
               bit_budget: int) -> CanonicalModel:
    need = f.max_var + 1
    if k is None:
        k = need
    elif k < need:
        raise ValueError(f"formula uses p{f.max_var} but k={k}")
    if cache is None:
        return canonical_model(L, k, bit_budget)
    return cache.get(L, k, bit_budget)


def decide(logic: LogicSpec | FrameClassLogic | str, f: Formula, *, k: int | None = None,
           cache: CanonicalCache | None = default_cache,
           bit_budget: int = DEFAULT_BIT_BUDGET) -> Verdict:
    """Is ``f`` a theorem of ``logic``?

    Frame-class countermodels are the canonical model itself with a refuting atom.
    """
    if isinstance(logic, str):
        logic = LogicSpec.named(logic)
    if isinstance(logic, FrameClassLogic):
        logic = LogicSpec(frames=logic)
    if logic.name is not None:
        name = logic.name
        if logic.height is not None:
            if (name, logic.height) == ("S4", 1):
                name = "S5"
            else:
                raise UnsupportedLogic(f"{name}[{logic.height}] is not supported; only S4[1] = S5")
        res = prove(name, f)
        if res.valid:
            return Verdict(True)
        _check_model(res.countermodel, f, res.world)
        return Verdict(False, res.countermodel, res.world)
    if logic.height is not None:
        return decide_height_bounded(logic.frames, logic.height, f, k=k, cache=cache, bit_budget=bit_budget)
    M = _canonical(logic.frames, f, k, cache, bit_budget)
    if any(i >= M.n for i in modalities(f)):
        raise ValueError("formula uses a modality the logic does not have")
    refuted = M.frame.full & ~truth_set(M.model, f)
    if not refuted:
        return Verdict(True)
    world = bits(refuted)[0]
    return Verdict(False, M.model, world)


def decide_height_bounded(logic: FrameClassLogic | LogicSpec, h: int, f: Formula, *,
                          k: int | None = None, cache: CanonicalCache | None = default_cache,
                          bit_budget: int = DEFAULT_BIT_BUDGET) -> Verdict:
    """Is ``f`` a theorem of ``L[h]``?  Checked on the depth-``≤ h`` part of
    the k-canonical model of ``L``, which is the k-canonical model of ``L[h]``."""
    L = _as_frame_class(logic)
    if h < 1:
        raise ValueError("h must be at least 1")
    M = _canonical(L, f, k, cache, bit_budget)
    fr, index = top_restriction(M.frame, h)
    valuation = tuple(mask_of(index[x] for x in bits(v) if x in index) for v in M.model.valuation)
    top = Model(fr, valuation)
    refuted = fr.full & ~truth_set(top, f)
    if not refuted:
        return Verdict(True)
    return Verdict(False, top, bits(refuted)[0])


def fmp_transfer_witness(logic: FrameClassLogic | LogicSpec, f: Formula, *,
                         cache: CanonicalCache | None = default_cache,
                         bit_budget: int = DEFAULT_BIT_BUDGET) -> tuple[Model, int]:
    """A height-1 model refuting ``f`` whose frame is a maximal cluster of a
    finite ``L``-model refuting ``◇*□*f``.

    Raises ``ValueError`` when ``◇*□*f`` is a theorem of ``L``.
    """
    L = _as_frame_class(logic)
    translated = glivenko_h1(f, L.m, L.n)
    verdict = decide(L, translated, k=f.max_var + 1, cache=cache, bit_budget=bit_budget)
    if verdict.valid:
        raise ValueError("the translation is valid; there is nothing to refute")
    model, x = verdict.countermodel, verdict.world
    fr = model.frame
    star = reach(fr)
    # every world above x refutes □*f, so f fails somewhere in each maximal cluster above x
    top = maximal_elements(fr, star[x])
    bad = fr.full & ~truth_set(model, f)
    for z in bits(top):
        cluster = star[z] & top
        if cluster & bad:
            sub, index = fr.restrict(star[z])
            valuation = tuple(mask_of(index[y] for y in bits(v & star[z])) for v in model.valuation)
            witness = Model(sub, valuation)
            world = index[bits(cluster & bad)[0]]
            _check_model(witness, f, world)
            return witness, world
    raise AssertionError("internal error: no maximal cluster refutes the formula")


def s5_frame_class(k: int) -> FrameClassLogic:
    """Clusters of sizes ``1..2^k``.

    Its logic agrees with S5 on formulas in ``k`` variables: identifying
    worlds of an S5 countermodel that agree on ``p_0..p_{k-1}`` leaves a
    cluster of at most ``2^k`` worlds refuting the same formula.
    """
    from .frames import cluster_frame
    return FrameClassLogic(tuple(cluster_frame(s) for s in range(1, (1 << k) + 1)))
