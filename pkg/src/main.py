import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

import argparse
import json
import logging
from fractions import Fraction
from typing import List, Optional

from pydantic import ValidationError

from src.config import Settings, settings
from src.environment.suites import SuiteRunner
from src.errors import IntegralityViolation, SchemaError, SymplecticIndexError, UnknownSuite
from src.models.documents import IndexReport, PathSpecDocument, SuiteSummary
from src.tools.czindex import nu
from src.tools.hamflow import gutzwiller_closed_form, oscillator_monodromy
from src.tools.report import build_report, format_index, path_from_document

logger = logging.getLogger("symplx")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_SCHEMA = 2
EXIT_INTEGRITY = 3


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%H:%M:%S',
        stream=sys.stderr,
    )


def format_report(report: IndexReport) -> str:
    lines = [
        f"{report.label} (n = {report.n}, {report.classification.value}, profile {report.tolerance_profile})",
        f"  nu             {report.nu}",
        f"  gutzwiller mu  {report.gutzwiller_mu}",
    ]
    for plane, mu in report.mu_rel.items():
        lines.append(f"  mu_{plane:<11} {mu}   (reduced {report.m_rel[plane]})")
    lines.append(f"  concavity      {report.concavity}")
    lines.append(f"  cz oracle      {report.cz_oracle}")
    for check in report.cross_check:
        lines.append(f"  [{check.status.value:>7}] {check.name} {check.detail}".rstrip())
    return "\n".join(lines)


def format_summary(summary: SuiteSummary) -> str:
    status = "PASS" if summary.passed else "FAIL"
    passed = ", ".join(f"{name} {count}" for name, count in sorted(summary.checks.items()))
    lines = [f"{status} {summary.suite} (seed {summary.seed}, {summary.count} instances): {passed}"]
    if summary.skipped:
        lines.append("  skipped: " + ", ".join(f"{k} {v}" for k, v in sorted(summary.skipped.items())))
    for failure in summary.failures:
        lines.append(
            f"  reproduce: verify {failure.suite} --seed {failure.seed} -> instance {failure.instance}, "
            f"{failure.check} residual {failure.residual:.3e} {failure.detail}"
        )
    return "\n".join(lines)


def cmd_index(args, tol: Settings) -> int:
    try:
        doc = PathSpecDocument.model_validate_json(Path(args.file).read_text())
    except (OSError, ValidationError) as e:
        print(f"invalid document {args.file}: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        path = path_from_document(doc, tol)
    except IntegralityViolation as e:
        print(f"integrity failure: {e}", file=sys.stderr)
        return EXIT_INTEGRITY
    except SymplecticIndexError as e:
        print(f"cannot build path ({e.code}): {e}", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        report = build_report(path, tol, label=doc.label)
    except IntegralityViolation as e:
        print(f"integrity failure: {e}", file=sys.stderr)
        return EXIT_INTEGRITY
    except SymplecticIndexError as e:
        print(f"cannot compute nu ({e.code}): {e}", file=sys.stderr)
        return EXIT_SCHEMA
    print(report.model_dump_json(indent=2) if args.format == "machine" else format_report(report))
    return EXIT_OK


def cmd_verify(args, tol: Settings) -> int:
    runner = SuiteRunner(seed=args.seed, count=args.count, tolerances=tol)
    try:
        summaries = runner.run_all() if args.suite == "all" else [runner.run(args.suite)]
    except UnknownSuite as e:
        print(str(e), file=sys.stderr)
        return EXIT_SCHEMA
    if args.format == "machine":
        print(json.dumps([s.model_dump(mode="json") for s in summaries], indent=2))
    else:
        print("\n".join(format_summary(s) for s in summaries))
    return EXIT_OK if all(s.passed for s in summaries) else EXIT_FAILED


def oscillator_rows(wx: float, wy: float, reps: int, axis: str, tol: Settings) -> List[dict]:
    rows = []
    for r in range(1, reps + 1):
        pipeline = -Fraction(nu(oscillator_monodromy(wx, wy, r, axis, tol), tol))
        closed = gutzwiller_closed_form(wx, wy, r, axis)
        rows.append({"r": r, "mu": format_index(pipeline), "closed_form": closed, "match": pipeline == closed})
    return rows


def cmd_oscillator_table(args, tol: Settings) -> int:
    try:
        rows = oscillator_rows(args.wx, args.wy, args.reps, args.axis, tol)
    except SchemaError as e:
        print(str(e), file=sys.stderr)
        return EXIT_SCHEMA
    except IntegralityViolation as e:
        print(f"integrity failure: {e}", file=sys.stderr)
        return EXIT_INTEGRITY
    if args.format == "machine":
        print(json.dumps(rows, indent=2))
    else:
        print(f"{'r':>3} {'mu = -nu':>9} {'closed form':>12}")
        for row in rows:
            flag = "" if row["match"] else "  MISMATCH"
            print(f"{row['r']:>3} {row['mu']:>9} {row['closed_form']:>12}{flag}")
    for row in rows:
        if not row["match"]:
            logger.warning("r = %d: pipeline %s, closed form %d", row["r"], row["mu"], row["closed_form"])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symplx", description="Maslov and Conley-Zehnder indices of symplectic paths")
    parser.add_argument("--tolerance-profile", choices=["strict", "default"], default="default")
    parser.add_argument("--format", choices=["machine", "human"], default="machine")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL)
    commands = parser.add_subparsers(dest="command", required=True)

    index = commands.add_parser("index", help="all indices of the path described by a JSON document")
    index.add_argument("file")
    index.set_defaults(handler=cmd_index)

    verify = commands.add_parser("verify", help="run a randomized property suite")
    verify.add_argument("suite")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--count", type=int, default=200)
    verify.set_defaults(handler=cmd_verify)

    table = commands.add_parser("oscillator-table", help="Gutzwiller indices of the 2-D oscillator")
    table.add_argument("--wx", type=float, required=True)
    table.add_argument("--wy", type=float, required=True)
    table.add_argument("--reps", type=int, default=6)
    table.add_argument("--axis", choices=["x", "y"], default="x")
    table.set_defaults(handler=cmd_oscillator_table)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    tol = settings.for_profile(args.tolerance_profile)
    if args.command == "verify" and args.count < 1:
        print("--count must be positive", file=sys.stderr)
        return EXIT_SCHEMA
    if args.command == "oscillator-table" and args.reps < 1:
        print("--reps must be positive", file=sys.stderr)
        return EXIT_SCHEMA
    logger.debug("Running %s with the %s tolerance profile", args.command, tol.TOLERANCE_PROFILE)
    return args.handler(args, tol)


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info("Interrupted")
        sys.exit(130)
