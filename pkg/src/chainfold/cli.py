"""Command line front end.

One executable, five subcommands, three exit codes: 0 success, 1 bad
arguments or unreadable input, 2 domain errors (fold collisions, copy
failures, unknown scenarios). JSON output is sorted and seeded so the
same invocation is byte-identical run to run.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import kinematics, protoevolution
from .copier import (
    CycleLimitExceededError,
    Sparing,
    SubunitProfile,
    TapeExhaustedError,
    run_copy,
)
from .encoding import UnknownTapeKindError, load_tape, negative_copy, tape_from_kinds, tape_to_json_dict
from .folding import FoldError, export_obj, fold, render_ascii, to_json_dict
from .mdl import MdlError, parse_mdl

DEFAULT_SEED = 7

_INPUT_ERRORS = (MdlError, FileNotFoundError, IsADirectoryError, json.JSONDecodeError, ValueError)
_DOMAIN_ERRORS = (
    FoldError,
    CycleLimitExceededError,
    TapeExhaustedError,
    UnknownTapeKindError,
    kinematics.KinematicsError,
    protoevolution.KindOutsideProfileError,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; our contract reserves 2 for domain errors
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _cmd_fold(args) -> int:
    text = Path(args.file).read_text(encoding="utf-8")
    chain = parse_mdl(text, strict=args.strict)
    structure = fold(chain, permissive=args.permissive)
    if args.format == "ascii":
        sys.stdout.write(render_ascii(structure))
    elif args.format == "obj":
        sys.stdout.write(export_obj(structure))
    else:
        _emit(to_json_dict(structure))
    return 0


def _cmd_corpus_verify(args) -> int:
    reports = corpus_mod.verify_corpus(args.fixtures)
    if args.json:
        _emit(
            {
                "fixtures": {
                    fid: {
                        "ok": r.ok,
                        "checks": [
                            {"name": c.name, "ok": c.ok, "detail": c.detail}
                            for c in r.checks
                        ],
                    }
                    for fid, r in reports.items()
                }
            }
        )
    else:
        width = max(len(fid) for fid in reports)
        for fid in sorted(reports):
            r = reports[fid]
            mark = "PASS" if r.ok else "FAIL"
            notes = "" if r.ok else "  " + "; ".join(
                f"{c.name}: {c.detail}" for c in r.checks if not c.ok
            )
            sys.stdout.write(f"{fid:<{width}}  {mark}{notes}\n")
        total = len(reports)
        good = sum(r.ok for r in reports.values())
        sys.stdout.write(f"{good}/{total} fixtures pass\n")
    return 0 if all(r.ok for r in reports.values()) else 2


def _cmd_corpus_stats(args) -> int:
    _emit(corpus_mod.corpus_stats(args.fixtures))
    return 0


def _load_tape_file(path: str):
    p = Path(path)
    if p.suffix == ".json":
        return load_tape(p)
    chain = parse_mdl(p.read_text(encoding="utf-8"))
    return tape_from_kinds(t.canonical for t in chain)


def _cmd_copy(args) -> int:
    tape = _load_tape_file(args.tape)
    profile = SubunitProfile(sparing=Sparing[args.sparing.upper()])
    run = run_copy(tape, profile=profile, seed=args.seed, max_cycles=args.max_cycles)
    _emit(
        {
            "config": {
                "tape": str(args.tape),
                "sparing": args.sparing,
                "seed": args.seed,
                "max_cycles": args.max_cycles,
            },
            "cycles": run.cycles,
            "backend": run.backend,
            "mutations": list(run.mutations),
            "mutation_count": len(run.mutations),
            "faithful": run.output == negative_copy(tape),
            "output": tape_to_json_dict(run.output),
        }
    )
    return 0


def _cmd_evolve(args) -> int:
    alphabet = protoevolution.build_alphabet(
        args.alphabet_size, include_separator=args.separator
    )
    exp = protoevolution.StreamExperiment(
        alphabet=alphabet,
        require_separator=args.separator,
        trials=args.trials,
        seed=args.seed,
    )
    report = protoevolution.mhbbg_probability(exp)
    _emit(
        {
            "config": {
                "alphabet_size": args.alphabet_size,
                "separator": args.separator,
                "trials": args.trials,
                "seed": args.seed,
            },
            "analytic": str(report.analytic),
            "analytic_float": float(report.analytic),
            "monte_carlo": report.monte_carlo,
            "stderr": report.stderr,
            "hits": report.hits,
            "trials": report.trials,
            "warning": report.warning,
            "backend": report.backend,
        }
    )
    return 0


def _cmd_scenario(args) -> int:
    trace = kinematics.run_scenario(
        args.name, length=args.length, ticks=args.ticks, seed=args.seed
    )
    full = kinematics.trace_to_json_dict(trace)
    if args.trace_out:
        Path(args.trace_out).write_text(
            json.dumps(full, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    summary = {k: v for k, v in full.items() if k != "frames"}
    summary["frame_count"] = len(full["frames"])
    _emit(summary)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="chainfold", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_fold = sub.add_parser("fold", help="fold a chain file into a structure")
    p_fold.add_argument("file", help="path to an .mdl chain file")
    p_fold.add_argument("--format", choices=("ascii", "json", "obj"), default="ascii")
    p_fold.add_argument("--strict", action="store_true", help="reject loose token spacing")
    p_fold.add_argument(
        "--permissive", action="store_true", help="record collisions instead of failing"
    )
    p_fold.set_defaults(func=_cmd_fold)

    p_corpus = sub.add_parser("corpus", help="fixture corpus tools")
    corpus_sub = p_corpus.add_subparsers(dest="corpus_command", required=True)
    p_verify = corpus_sub.add_parser("verify", help="re-check every fixture")
    p_verify.add_argument("--fixtures", default=None, help="fixture directory override")
    p_verify.add_argument("--json", action="store_true", help="machine-readable report")
    p_verify.set_defaults(func=_cmd_corpus_verify)
    p_stats = corpus_sub.add_parser("stats", help="cross-machine statistics")
    p_stats.add_argument("--fixtures", default=None)
    p_stats.set_defaults(func=_cmd_corpus_stats)

    p_copy = sub.add_parser("copy", help="run the randomized tape copier")
    p_copy.add_argument("--tape", required=True, help=".json tape or .mdl chain")
    p_copy.add_argument(
        "--sparing", choices=("one_side", "both_sides"), default="one_side"
    )
    p_copy.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_copy.add_argument("--max-cycles", type=int, default=None)
    p_copy.set_defaults(func=_cmd_copy)

    p_evolve = sub.add_parser("evolve", help="random-stream self-copy statistics")
    p_evolve.add_argument("--alphabet-size", type=int, default=6)
    p_evolve.add_argument("--trials", type=int, default=1_000_000)
    p_evolve.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_evolve.add_argument(
        "--separator", action="store_true", help="require a trailing dissolvable"
    )
    p_evolve.set_defaults(func=_cmd_evolve)

    p_scn = sub.add_parser("scenario", help="simulate a track-machine template")
    p_scn.add_argument("--name", required=True, help="walker, retainer, or shuttle")
    p_scn.add_argument("--length", type=int, default=8)
    p_scn.add_argument("--ticks", type=int, default=None)
    p_scn.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_scn.add_argument("--trace-out", default=None, help="write the full trace JSON here")
    p_scn.set_defaults(func=_cmd_scenario)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _DOMAIN_ERRORS as exc:
        if isinstance(exc, FoldError) and hasattr(exc, "chain_index"):
            sys.stderr.write(f"chainfold: collision at index {exc.chain_index}\n")
        else:
            sys.stderr.write(f"chainfold: {exc}\n")
        return 2
    except _INPUT_ERRORS as exc:
        sys.stderr.write(f"chainfold: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
