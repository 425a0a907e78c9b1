"""Command-line front end for running, checking, and analyzing elections.

Exit codes: 0 success or verified match, 1 verification mismatch, 2 parse
or usage error, 3 no electable candidate, 4 enumeration scale refused,
5 dictator-seed search exhausted.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analysis, engine, model

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_NO_ELECTABLE = 3
EXIT_SCALE = 4
EXIT_NOT_FOUND = 5


def _read_text(path: str) -> str:
    data = Path(path).read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise model.ParseError(0, f"{path} is not UTF-8: {e}") from None


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _load_sheet(args) -> tuple[model.ElectionConfig, list[model.Candidate], model.BallotSheet]:
    config = model.ElectionConfig(k=args.k, n_places=getattr(args, "places", 1))
    candidates = model.parse_candidates(_read_text(args.candidates), config)
    sheet = engine.ballot_permutation(engine.order_candidates(candidates), config)
    return config, candidates, sheet


def cmd_ballot_order(args) -> int:
    config, _, sheet = _load_sheet(args)
    text = model.format_sheet(sheet, config)
    if args.out:
        _write_text(args.out, text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_run(args) -> int:
    config, _, sheet = _load_sheet(args)
    ballots = model.parse_ballots(_read_text(args.ballots), len(sheet), config)
    result = engine.tally(sheet, ballots, config)
    text = model.format_result(sheet, len(ballots), result, config)
    _write_text(args.out, text)
    print(f"elected: {model.format_prefs(result.elected)}")
    if result.truncated:
        print("note: ballots ran out before all places were filled")
    print(f"result written to {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    config = model.ElectionConfig(k=args.k, n_places=args.places)
    claimed = model.parse_result(_read_text(args.result))
    report = engine.verify(
        _read_text(args.candidates), _read_text(args.ballots), config, claimed)
    sys.stdout.write(report.render())
    return EXIT_OK if report.ok else EXIT_MISMATCH


def _finish_analysis(report: analysis.EnumerationReport, args) -> int:
    _write_text(args.out, analysis.report_to_json(report))
    sys.stdout.write(analysis.render_report(report))
    print(f"report written to {args.out}")
    return EXIT_OK


def cmd_analyze_sc(args) -> int:
    config = model.ElectionConfig(k=args.k)
    report = analysis.sc_ordering_distribution(
        args.c, config, mixture_weight=args.mixture_weight,
        threads=args.threads, force=args.force)
    return _finish_analysis(report, args)


def cmd_analyze_sv(args) -> int:
    config, _, sheet = _load_sheet(args)
    ballots = model.parse_ballots(_read_text(args.ballots), len(sheet), config)
    report = analysis.election_distribution(
        ballots, sheet, config, threads=args.threads, force=args.force)
    return _finish_analysis(report, args)


def cmd_attack_demo(args) -> int:
    config, _, sheet = _load_sheet(args)
    others = model.parse_ballots(_read_text(args.ballots), len(sheet), config)
    target_prefs = model.parse_prefs(args.target_prefs, len(sheet))
    found = engine.find_dictator_seed(
        sheet, others, target_prefs, config, seat1_only=args.seat1_only)
    if found is None:
        print(f"no dictator seed in [0, {config.m}) for this instance")
        return EXIT_NOT_FOUND
    print(f"dictator seed found: {config.format_seed(found)}")
    ballots = others + [model.VoterBallot(seed=found, prefs=target_prefs)]
    result = engine.tally(sheet, ballots, config)
    print(f"proof re-run elects: {model.format_prefs(result.elected)}")
    print(f"target preferences:  {model.format_prefs(target_prefs)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vdrd",
        description="Run, verify, and analyze voter-determined random dictator elections.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ballot-order", help="draw the candidate ordering for the ballot sheet")
    p.add_argument("--candidates", required=True, help="candidates file")
    p.add_argument("--k", type=int, required=True, help="seed digit count")
    p.add_argument("--out", help="also write the sheet to this file")
    p.set_defaults(func=cmd_ballot_order)

    p = sub.add_parser("run", help="run a full election")
    p.add_argument("--candidates", required=True)
    p.add_argument("--ballots", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--places", type=int, required=True, help="seats to fill")
    p.add_argument("--out", required=True, help="result file to write")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="recompute an election and compare to a claimed result")
    p.add_argument("--candidates", required=True)
    p.add_argument("--ballots", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--places", type=int, required=True)
    p.add_argument("--result", required=True, help="claimed result file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze-sc", help="enumerate all seeds; measure ballot-ordering uniformity")
    p.add_argument("--c", type=int, required=True, help="candidate count")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True, help="JSON report to write")
    p.add_argument("--mixture-weight", type=int, default=None,
                   help="uniform parts in the modified-KL mixture (default: outcome-space size)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--force", action="store_true", help="allow k beyond desk scale")
    p.set_defaults(func=cmd_analyze_sc)

    p = sub.add_parser("analyze-sv", help="enumerate all seeds; measure distance from the exact rule")
    p.add_argument("--candidates", required=True)
    p.add_argument("--ballots", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--places", type=int, required=True)
    p.add_argument("--out", required=True, help="JSON report to write")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_analyze_sv)

    p = sub.add_parser("attack-demo", help="search the seed space for a dictator seed")
    p.add_argument("--candidates", required=True)
    p.add_argument("--ballots", required=True, help="the other voters' ballots")
    p.add_argument("--target-prefs", required=True, help="target preferences, e.g. 3>1>2")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--places", type=int, required=True)
    p.add_argument("--seat1-only", action="store_true",
                   help="only require control of the first seat")
    p.set_defaults(func=cmd_attack_demo)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except model.ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except model.NoElectableError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NO_ELECTABLE
    except analysis.ScaleError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCALE
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
