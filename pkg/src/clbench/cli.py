"""Command-line front end.

Exit status: 0 on success, 1 on a domain-negative outcome (not tautological,
proof rejected, negative query answer for ``taut``), 2 on usage or budget
errors.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .budget import Budget, BudgetExceeded
from .cirquent import check_proof, parse_derivation
from .derivation import NotTautological, PipelineError, prove
from .formula import FormulaSyntaxError, Formula, parse_formula, render
from .game import (
    Copycat,
    IllegalMoveError,
    Interactive,
    Scripted,
    Silent,
    default_pairing,
    format_transcript,
    parse_transcript,
    play,
)
from .hyper import build_hyperformula, is_binary, is_tautology, to_text
from .units import (
    TRIVIAL,
    build_tree,
    dominates,
    opposite_pairs,
    parse_pairing,
    parse_resolution,
    parse_unit,
    visible,
)

OK, NEGATIVE, USAGE = 0, 1, 2
ADVERSARIES = ("silent", "scripted", "copycat", "interactive")


class UsageError(Exception):
    pass


@dataclass
class Config:
    formula: Formula
    height: int = 0
    iterations: int = 0
    adversary: str = "silent"
    script: Optional[Path] = None
    pairing: Optional[Path] = None
    out: Optional[Path] = None
    report: Optional[Path] = None
    trace: bool = False
    budget: Budget = field(default_factory=Budget)

    def __post_init__(self):
        if self.height < 0:
            raise UsageError("--height must be non-negative")
        if self.iterations < 0:
            raise UsageError("--iterations must be non-negative")
        if self.adversary not in ADVERSARIES:
            raise UsageError(f"unknown adversary {self.adversary!r}")
        if self.adversary == "scripted" and self.script is None:
            raise UsageError("--adversary scripted needs --script")


def _read_formula(text: str) -> Formula:
    if text.startswith("@"):
        text = Path(text[1:]).read_text().strip()
    return parse_formula(text)


def _config(args) -> Config:
    return Config(
        formula=_read_formula(args.formula),
        height=getattr(args, "height", 0),
        iterations=getattr(args, "iterations", 0),
        adversary=getattr(args, "adversary", "silent"),
        script=getattr(args, "script", None),
        pairing=getattr(args, "pairing", None),
        out=getattr(args, "out", None),
        report=getattr(args, "report", None),
        trace=getattr(args, "trace", False),
        budget=Budget.from_env(),
    )


def _adversary(cfg: Config):
    f = cfg.formula
    if cfg.adversary == "silent":
        return Silent()
    if cfg.adversary == "copycat":
        return Copycat(f, default_pairing(f))
    if cfg.adversary == "scripted":
        return Scripted.from_transcript(f, parse_transcript(cfg.script.read_text()))
    return Interactive(f, read=input, write=lambda s: print(s, file=sys.stderr))


def _run(cfg: Config) -> tuple:
    return play(cfg.formula, _adversary(cfg), cfg.iterations, cfg.budget).run


def _write(path: Optional[Path], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _write_report(cfg: Config, items: dict) -> None:
    if cfg.report is None:
        return
    lines = [f"{k}:{v}" for k, v in items.items()]
    lines += [f"budget.{k}:{v}" for k, v in vars(cfg.budget).items()]
    cfg.report.write_text("\n".join(lines) + "\n")


# --- commands --------------------------------------------------------------

def cmd_parse(args) -> int:
    print(render(_read_formula(args.formula)))
    return OK


def cmd_simulate(args) -> int:
    cfg = _config(args)
    p = play(cfg.formula, _adversary(cfg), cfg.iterations, cfg.budget)
    _write(cfg.out, format_transcript(p.run))
    _write_report(cfg, {"command": "simulate", "moves": len(p.run), "grants": p.grants,
                        "stopped": str(p.stopped).lower()})
    return OK


def _pairing_for(cfg: Config, t, run):
    if cfg.pairing is not None:
        pairing = parse_pairing(cfg.pairing.read_text())
        pairing.validate(cfg.formula)
        return pairing
    return opposite_pairs(t, run)


def cmd_analyze(args) -> int:
    cfg = _config(args)
    r = parse_resolution(Path(args.resolution).read_text()) if args.resolution else TRIVIAL
    t = build_tree(cfg.formula, cfg.height, r, cfg.budget)
    run = _run(cfg)
    pairing = _pairing_for(cfg, t, run)
    out = []
    for line in Path(args.queries).read_text().splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if len(parts) != 3:
            raise UsageError(f"bad query {line!r}")
        op, a, b = parts[0], parse_unit(parts[1]), parse_unit(parts[2])
        if op == "drives":
            h = t.drives(a, b) if a in t and b in t else None
            ans = "no" if h is None else f"yes via {h}"
        elif op == "strictly_drives":
            ans = "yes" if a in t and b in t and t.strictly_drives(r, a, b) else "no"
        elif op == "visible":
            ans = "yes" if a in t and b in t and visible(t, r, pairing, a, b) else "no"
        elif op == "dominates":
            w = dominates(t, pairing, a, b, cfg.budget) if a in t and b in t else None
            if w is None:
                ans = "no"
            elif w.by_subunit:
                ans = "yes subunit"
            else:
                ans = "yes chain " + " ".join(f"({l},{m},{x})" for l, m, x in w.chain)
        else:
            raise UsageError(f"unknown query {op!r}")
        out.append(f"{op} {a} {b} -> {ans}")
    _write(cfg.out, "".join(s + "\n" for s in out))
    return OK


def cmd_taut(args) -> int:
    cfg = _config(args)
    r = parse_resolution(Path(args.resolution).read_text()) if args.resolution else TRIVIAL
    t = build_tree(cfg.formula, cfg.height, r, cfg.budget)
    if cfg.pairing is not None:
        hf = build_hyperformula(t, None, _pairing_for(cfg, t, ()), cfg.budget)
    else:
        hf = build_hyperformula(t, _run(cfg), budget=cfg.budget)
    taut = is_tautology(hf, cfg.budget)
    binary = is_binary(hf)
    _write(cfg.out, f"hyperformula: {to_text(hf)}\nbinary: {str(binary).lower()}\n"
                    f"tautology: {str(taut).lower()}\n")
    _write_report(cfg, {"command": "taut", "binary": str(binary).lower(),
                        "tautology": str(taut).lower()})
    return OK if taut else NEGATIVE


def cmd_prove(args) -> int:
    cfg = _config(args)
    pairing = None
    run = None
    if cfg.pairing is not None:
        pairing = parse_pairing(cfg.pairing.read_text())
    else:
        run = _run(cfg)
    result = prove(cfg.formula, cfg.height, run, pairing, cfg.budget, minimize=args.minimize)
    if isinstance(result, NotTautological):
        print(str(result), file=sys.stderr)
        _write_report(cfg, {"command": "prove", "outcome": "not-tautological",
                            "stage": result.stage, **result.report})
        return NEGATIVE
    text = result.derivation.to_text()
    _write(cfg.out, text)
    if cfg.trace:
        for step in result.first.trace:
            print(step.to_text(), file=sys.stderr)
    _write_report(cfg, {"command": "prove", "outcome": "proof", **result.report})
    return OK


def cmd_check(args) -> int:
    f = parse_formula(args.formula) if args.formula else None
    try:
        d = parse_derivation(Path(args.proof).read_text())
    except ValueError as e:
        print(f"rejected: malformed proof file: {e}", file=sys.stderr)
        return NEGATIVE
    bad = check_proof(d, f)
    if bad is not None:
        print(f"rejected at {bad}", file=sys.stderr)
        return NEGATIVE
    print(f"ok: {len(d)} steps")
    return OK


# --- argument parsing ------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="clbench", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, play=True, tree=True):
        p.add_argument("formula", help="formula text, or @file")
        if tree:
            p.add_argument("--height", type=int, default=0)
        if play:
            p.add_argument("--iterations", type=int, default=0)
            p.add_argument("--adversary", choices=ADVERSARIES, default="silent")
            p.add_argument("--script", type=Path, help="transcript replayed by 'scripted'")
        p.add_argument("--out", type=Path)
        p.add_argument("--report", type=Path, help="key:value summary file")

    p = sub.add_parser("parse", help="normalize and echo a formula")
    p.add_argument("formula")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("simulate", help="play the counterstrategy and write a transcript")
    common(p, tree=False)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="answer driving/visibility/domination queries")
    common(p)
    p.add_argument("--queries", required=True, type=Path)
    p.add_argument("--resolution", type=Path)
    p.add_argument("--pairing", type=Path)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("taut", help="binarity and tautologicity of the image")
    common(p)
    p.add_argument("--resolution", type=Path)
    p.add_argument("--pairing", type=Path)
    p.set_defaults(func=cmd_taut)

    p = sub.add_parser("prove", help="run the full pipeline and write a proof")
    common(p)
    p.add_argument("--pairing", type=Path)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--minimize", action="store_true", help="greedy disjunct pruning")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("check", help="verify a proof file")
    p.add_argument("proof", type=Path)
    p.add_argument("--formula", help="expected formula (defaults to the file's)")
    p.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        return args.func(args)
    except (UsageError, FormulaSyntaxError, BudgetExceeded, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    except IllegalMoveError as e:
        print(f"error: illegal adversary move {e.move}", file=sys.stderr)
        return USAGE
    except PipelineError as e:
        print(f"error: {e}", file=sys.stderr)
        return NEGATIVE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
