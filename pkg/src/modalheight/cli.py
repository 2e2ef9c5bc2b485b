"""Command-line interface: ``modalheight <command> ...``.

Exit codes: 0 on success (for ``verify``: the suite passed), 2 when a
verification suite ran and found failures, 1 on any error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import __version__
from .algebra import (DEFAULT_CAP, FrameClassLogic, build_free_algebra, canonical_model,
                      dual_canonical_model)
from .decision import LogicSpec, decide, decide_height_bounded
from .frames import depths, height, random_frame, skeleton, transitivity_degree
from .generate import enumerate_formulas, random_euclidean_frame, random_formula, random_preorder
from .kripke import Frame, bits
from .parser import parse, pretty, render
from .schemes import depth_formulas, glivenko_h1, main_translation
from . import verify as V

EXIT_OK, EXIT_ERROR, EXIT_FAILURES = 0, 1, 2


class CliError(Exception):
    pass


def load_frames(path: str) -> tuple[Frame, ...]:
    """A frames file holds one frame object, a list of them, or ``{"frames": [...]}``."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read frames file {path}: {exc}") from exc
    if isinstance(data, dict) and "frames" in data:
        data = data["frames"]
    items = data if isinstance(data, list) else [data]
    if not items:
        raise CliError(f"{path} contains no frames")
    return tuple(Frame.from_json(item) for item in items)


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _require(args, *names: str) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise CliError("missing " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _logic(args) -> FrameClassLogic:
    _require(args, "frames")
    return FrameClassLogic(load_frames(args.frames))


# ---------------------------------------------------------------- commands

def cmd_frame(args) -> int:
    frames = load_frames(args.file)
    if args.action == "render":
        _emit(args, "\n".join(fr.to_dot(f"frame{i}") for i, fr in enumerate(frames)))
        return EXIT_OK
    infos = []
    for fr in frames:
        sk = skeleton(fr)
        infos.append({
            "height": sk.height,
            "transitivity_degree": transitivity_degree(fr),
            "clusters": [bits(c) for c in sk.clusters],
            "skeleton_edges": [list(e) for e in sk.edges()],
            "depths": list(depths(fr)),
        })
    _emit(args, _dump(infos[0] if len(infos) == 1 else infos))
    return EXIT_OK


def cmd_logic(args) -> int:
    _require(args, "frames", "vars")
    L = _logic(args)
    A = build_free_algebra(L, args.vars, args.cap)
    M = dual_canonical_model(A)
    fr = M.frame
    if args.dot:
        labels = [pretty(a) for a in M.atom_labels]
        _emit(args, fr.to_dot("canonical", labels))
        return EXIT_OK
    out = {
        "algebra_size": A.size,
        "atoms": len(M),
        "relations": [fr.pairs(i) for i in range(fr.n)],
        "valuation": [bits(v) for v in M.model.valuation],
        "atom_labels": [render(a) for a in M.atom_labels],
        "heights": {"canonical": height(fr), "frames": [height(x) for x in L.frames]},
        "depths": list(depths(fr)),
        "m": L.m,
    }
    _emit(args, _dump(out))
    return EXIT_OK


def _spec(text: str, h: int | None) -> LogicSpec:
    if text.lower().startswith("frames:"):
        return LogicSpec(frames=FrameClassLogic(load_frames(text[len("frames:"):])), height=h)
    return LogicSpec.named(text, h)


def cmd_decide(args) -> int:
    _require(args, "logic", "formula")
    spec = _spec(args.logic, args.height)
    n = spec.frames.n if spec.frames is not None else 1
    f = parse(args.formula, n)
    verdict = decide(spec, f, cache=None)
    if args.json:
        _emit(args, _dump(verdict.to_json()))
    elif verdict.valid:
        _emit(args, "valid")
    else:
        cm = verdict.countermodel
        _emit(args, f"not valid: refuted at world {verdict.world} of\n{_dump(cm.to_json())}")
    return EXIT_OK


def cmd_translate(args) -> int:
    _require(args, "frames", "formula")
    L = _logic(args)
    f = parse(args.formula, L.n)
    k = args.vars if args.vars is not None else f.max_var + 1
    if args.mode == "h1":
        translated = glivenko_h1(f, L.m, L.n)
        target = 1
    else:
        _require(args, "height")
        translated = main_translation(f, depth_formulas(canonical_model(L, k), args.height))
        target = args.height + 1
    out = {"translation": pretty(translated)}
    if args.verify:
        out["height_bounded_valid"] = decide_height_bounded(L, target, f, k=k).valid
        out["translation_valid"] = decide(L, translated, k=k).valid
        out["agree"] = out["height_bounded_valid"] == out["translation_valid"]
    if args.json:
        _emit(args, _dump(out))
    else:
        lines = [out["translation"]]
        if args.verify:
            lines.append(f"L[{target}] |- phi: {out['height_bounded_valid']}")
            lines.append(f"L |- translation: {out['translation_valid']}")
        _emit(args, "\n".join(lines))
    return EXIT_OK


def _formulas(args, k: int, depth: int, default_count: int):
    count = args.count or default_count
    if args.seed is None:
        return list(enumerate_formulas(k, depth, count=count))
    rng = random.Random(args.seed)
    return [random_formula(rng, k, depth) for _ in range(count)]


def cmd_verify(args) -> int:
    suite = args.suite
    seed = args.seed
    if suite == "bh":
        if args.frames:
            corpus = load_frames(args.frames)
        else:
            corpus = V.bh_corpus(random_count=args.count if args.count is not None else 200, seed=seed or 0)
        report = V.verify_bh(corpus, seed=seed)
    elif suite == "k5":
        report = V.verify_k5(args.count or 200, seed or 0)
    elif suite == "truth":
        report = V.verify_truth_lemma(_corpus(args), args.cap)
    elif suite == "topheavy":
        _require(args, "vars")
        report = V.verify_topheavy(_logic(args), args.vars, args.height)
    elif suite == "main":
        _require(args, "vars", "height")
        report = V.verify_main(_logic(args), args.vars, args.height,
                               _formulas(args, args.vars, 2, 2000), seed=seed)
    elif suite == "embedd":
        _require(args, "vars")
        fs = _formulas(args, args.vars, 2, 400)
        pairs = list(zip(fs[::2], fs[1::2])) if seed is not None else [(a, b) for a in fs[:20] for b in fs[:20]]
        report = V.verify_embedd(_logic(args), args.vars, pairs, seed=seed)
    elif suite == "s4s5":
        report = V.verify_s4s5(seed or 0, args.count or 300)
    elif suite == "fmp":
        report = V.verify_fmp(args.count or 100, seed or 0)
    elif suite == "heavy":
        report = V.verify_heavy(_corpus(args))
    elif suite == "section5":
        report = V.verify_section5()
    elif suite == "s4-sound":
        report = V.verify_s4_sound(seed or 0, args.count or 200)
    else:  # pragma: no cover - argparse restricts the choices
        raise CliError(f"unknown suite {suite}")
    _emit(args, report.dumps() if args.json else _text_report(report))
    return EXIT_OK if report.passed else EXIT_FAILURES


def _corpus(args):
    if args.frames:
        ks = [args.vars] if args.vars is not None else [0, 1]
        L = _logic(args)
        return [(args.frames, L, k) for k in ks]
    return V.truth_lemma_corpus()


def _text_report(report: V.VerificationReport) -> str:
    lines = [report.summary()]
    for key, value in sorted(report.notes.items()):
        lines.append(f"  {key}: {value}")
    for failure in report.to_json()["failures"][:20]:
        lines.append(f"  FAIL {failure['input']}: expected {failure['expected']}, got {failure['actual']}")
    return "\n".join(lines)


def cmd_gen(args) -> int:
    if args.what == "formulas":
        k = args.vars if args.vars is not None else 1
        fs = _formulas(args, k, args.depth, 20)
        _emit(args, "\n".join(pretty(f) for f in fs))
        return EXIT_OK
    rng = random.Random(args.seed or 0)
    count = args.count or 10
    worlds = args.worlds
    makers = {
        "random": lambda: random_frame(rng.randint(1, worlds), 1, 0.4, rng=rng),
        "euclidean": lambda: random_euclidean_frame(rng, worlds),
        "preorder": lambda: random_preorder(rng, worlds, 2),
    }
    frames = [makers[args.kind]() for _ in range(count)]
    _emit(args, json.dumps([fr.to_json() for fr in frames], sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--json", action="store_true", help="JSON output")

    p = argparse.ArgumentParser(prog="modalheight", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    fr = sub.add_parser("frame", parents=[common], help="frame structure or DOT rendering")
    fr.add_argument("action", choices=["info", "render"])
    fr.add_argument("file")
    fr.add_argument("--dot", action="store_true", help="(render always emits DOT)")
    fr.set_defaults(run=cmd_frame)

    lg = sub.add_parser("logic", parents=[common], help="canonical model of a frame-class logic")
    lg.add_argument("action", choices=["canonical"])
    lg.add_argument("--frames")
    lg.add_argument("--vars", type=int)
    lg.add_argument("--cap", type=int, default=DEFAULT_CAP)
    lg.add_argument("--dot", action="store_true")
    lg.set_defaults(run=cmd_logic)

    dc = sub.add_parser("decide", parents=[common], help="decide validity")
    dc.add_argument("--logic", help="s4, s5, k, t, k4 or frames:<file>")
    dc.add_argument("--height", type=int)
    dc.add_argument("--formula")
    dc.set_defaults(run=cmd_decide)

    tr = sub.add_parser("translate", parents=[common], help="build a translation")
    tr.add_argument("--mode", choices=["h1", "main"], default="main")
    tr.add_argument("--frames")
    tr.add_argument("--vars", type=int)
    tr.add_argument("--height", type=int)
    tr.add_argument("--formula")
    tr.add_argument("--verify", action="store_true")
    tr.set_defaults(run=cmd_translate)

    vf = sub.add_parser("verify", parents=[common], help="run a verification suite")
    vf.add_argument("suite", choices=["bh", "k5", "truth", "topheavy", "main", "embedd", "s4s5",
                                      "fmp", "heavy", "section5", "s4-sound"])
    vf.add_argument("--frames")
    vf.add_argument("--vars", type=int)
    vf.add_argument("--height", type=int)
    vf.add_argument("--seed", type=int)
    vf.add_argument("--count", type=int)
    vf.add_argument("--cap", type=int, default=DEFAULT_CAP)
    vf.set_defaults(run=cmd_verify)

    gn = sub.add_parser("gen", parents=[common], help="generate formulas or frames")
    gn.add_argument("what", choices=["formulas", "frames"])
    gn.add_argument("--vars", type=int)
    gn.add_argument("--depth", type=int, default=2)
    gn.add_argument("--count", type=int)
    gn.add_argument("--seed", type=int)
    gn.add_argument("--kind", choices=["random", "euclidean", "preorder"], default="random")
    gn.add_argument("--worlds", type=int, default=4)
    gn.set_defaults(run=cmd_gen)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except (CliError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
