"""Command-line interface for the hyper-binom toolkit.

Subcommands verify identities and lemmas over parameter grids, recognize user-supplied sums
as hypergeometric series, evaluate pFq literals and run the randomized rule oracle.

Example:
    $ hyper-binom verify --id S3 --n 0..100 --mode exact
    $ hyper-binom recognize --sum "binom(n+k,k)/pow(2,k)" --n 3 --from 0 --to n
    $ hyper-binom recognize --ratio "4,1;2,2"
    $ hyper-binom eval --pfq "3F2(1/2,1,1;3/2,3/2;-1/4)" --digits 40
    $ hyper-binom rules check --id saalschutz --trials 500 --seed 42
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from mpmath import mp

from hyperbinom import get_version
from hyperbinom.errors import (
    Divergent,
    DomainError,
    HyperBinomError,
    IrrationalRoots,
    NotHypergeometric,
    OutOfDomain,
    TermSyntaxError,
    UnknownIdentity,
    UnknownLemma,
    UnknownRule,
)
from hyperbinom.hyper import PFQ, SumSpec, classify, direct_sum, recognize, recognize_ratio
from hyperbinom.identities import IDENTITIES, LEMMAS, GridConfig, Mode, verify_all
from hyperbinom.rules import RULES, check_rule, get_rule
from hyperbinom.special import eval_pfq_numeric
from hyperbinom.termlang import parse_term_spec

__all__ = [
    "RunConfig",
    "cmd_eval",
    "cmd_recognize",
    "cmd_rules",
    "cmd_verify",
    "configure_logging",
    "main",
    "parse_args",
]

DEFAULT_DIGITS = 50

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_NOT_HYPERGEOMETRIC = 3

logger = logging.getLogger("hyper-binom")


def configure_logging(verbose: bool = False) -> logging.Logger:
    """Configure logging for the CLI.

    Records go to stderr so that reports written to stdout stay deterministic.

    Returns:
        The project logger.
    """
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(stream=sys.stderr)],
    )
    return logging.getLogger("hyper-binom")


def _int_env(name: str, default: int | None, *, minimum: int | None = None) -> int | None:
    """Integer environment default; blank or malformed values fall back to ``default``."""

    raw = os.environ.get(name)
    if raw is None:
        return default

    raw = raw.strip()
    if raw == "":
        return default

    try:
        value = int(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r: not an integer", name, raw)
        return default

    if minimum is not None:
        return max(value, minimum)

    return value


def parse_range(text: str) -> tuple[int, int]:
    """Parse ``"a..b"`` (inclusive) or a single integer ``"a"``."""

    low, separator, high = text.partition("..")
    try:
        start = int(low)
        end = int(high) if separator else start
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or a range a..b, got {text!r}")
    return start, end


def parse_ratio(text: str) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Parse ``"p0,p1,...;q0,q1,..."``: coefficients of ``k^0, k^1, ...`` in ``P(k) / Q(k)``."""

    parts = text.split(";")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'p0,p1,...;q0,q1,...', got {text!r}")
    try:
        numerator, denominator = (
            tuple(Fraction(c.strip()) for c in part.split(",")) for part in parts
        )
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed coefficient in {text!r}")
    return numerator, denominator


def parse_bound(text: str) -> int | str:
    """Upper summation bound: an integer, ``n`` or ``inf``."""

    if text in ("n", "inf"):
        return text
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, 'n' or 'inf', got {text!r}")


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one CLI invocation."""

    command: str
    ids: tuple[str, ...] = ()
    ranges: dict[str, tuple[int, int]] = field(default_factory=dict)
    mode: Mode | None = None
    digits: int | None = None
    trials: int = 200
    seed: int = 0
    jobs: int = 1
    chain: bool = False
    outside_domain: bool = False
    out: Path | None = None
    output_format: str = "json"
    verbose: bool = False
    sum_text: str | None = None
    ratio: tuple[tuple[Fraction, ...], tuple[Fraction, ...]] | None = None
    n: int = 0
    m: int = 0
    start: int = 0
    end: int | str = "n"
    pfq_text: str | None = None

    def __post_init__(self) -> None:
        if self.digits is not None and self.digits < 10:
            raise OutOfDomain(f"digits must be at least 10, got {self.digits}")
        for name, (low, high) in self.ranges.items():
            if low > high:
                raise OutOfDomain(f"empty range for --{name}: {low}..{high}")
        if self.trials < 1:
            raise OutOfDomain(f"trials must be positive, got {self.trials}")
        if self.jobs < 1:
            raise OutOfDomain(f"jobs must be positive, got {self.jobs}")
        if self.output_format not in ("json", "text"):
            raise OutOfDomain(f"unknown output format {self.output_format!r}")

    @property
    def working_digits(self) -> int:
        return self.digits or DEFAULT_DIGITS


def _add_output_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, help="Write the report to this file.")
    parser.add_argument(
        "--format",
        dest="output_format",
        choices=("json", "text"),
        default="json",
        help="Report format (default: json).",
    )
    parser.add_argument("--digits", type=int, help="Working precision in decimal digits.")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyper-binom",
        description="Recognize binomial sums as hypergeometric series and verify identities.",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {get_version()}",
        help="Show the hyper-binom version and exit.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="Verify identities and lemmas over a grid.")
    verify.add_argument(
        "--id",
        dest="ids",
        action="append",
        default=[],
        help="Identity (S0-S9) or lemma id; repeatable. Default: everything.",
    )
    for name in ("n", "m", "k"):
        verify.add_argument(
            f"--{name}", type=parse_range, help=f"Value or inclusive range a..b for {name}."
        )
    verify.add_argument("--mode", choices=[mode.value for mode in Mode], help="Comparison mode.")
    verify.add_argument("--chain", action="store_true", help="Replay proof chains as well.")
    verify.add_argument(
        "--outside-domain",
        action="store_true",
        help="Include informational points outside domains.",
    )
    verify.add_argument("--jobs", type=int, help="Worker processes (default: 1).")
    _add_output_options(verify)

    recognize_parser = commands.add_parser("recognize", help="Recognize a sum as a pFq.")
    source = recognize_parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--sum", dest="sum_text", help="Summand text.")
    source.add_argument(
        "--ratio", type=parse_ratio, help='Term ratio P(k)/Q(k) as "p0,p1,...;q0,q1,...".'
    )
    recognize_parser.add_argument("--n", type=int, default=0, help="Value of n.")
    recognize_parser.add_argument("--m", type=int, default=0, help="Value of m.")
    recognize_parser.add_argument("--from", dest="start", type=int, default=0)
    recognize_parser.add_argument("--to", dest="end", type=parse_bound, default="n")
    _add_output_options(recognize_parser)

    evaluate = commands.add_parser("eval", help="Evaluate a pFq literal.")
    evaluate.add_argument("--pfq", dest="pfq_text", required=True, help='e.g. "2F1(-2,-2;1;1)".')
    _add_output_options(evaluate)

    rules = commands.add_parser("rules", help="Inspect or fuzz the rule registry.")
    rule_commands = rules.add_subparsers(dest="rules_command", required=True)
    check = rule_commands.add_parser("check", help="Run the randomized rule oracle.")
    check.add_argument("--id", dest="ids", action="append", default=[], help="Rule id.")
    check.add_argument("--trials", type=int, default=200)
    check.add_argument("--seed", type=int, default=0)
    _add_output_options(check)
    listing = rule_commands.add_parser("list", help="List registered rules.")
    _add_output_options(listing)
    return parser


def parse_args(argv: Sequence[str] | None = None) -> RunConfig:
    """Parse command-line arguments into a RunConfig.

    Raises:
        SystemExit: With code 2 on usage errors (argparse convention).
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command
    if command == "rules":
        command = f"rules-{args.rules_command}"
    digits = args.digits
    if digits is None:
        digits = _int_env("HYPER_BINOM_DIGITS", None, minimum=10)
    jobs = getattr(args, "jobs", None) or _int_env("HYPER_BINOM_JOBS", 1, minimum=1) or 1
    ranges = {
        name: getattr(args, name)
        for name in ("n", "m", "k")
        if command == "verify" and getattr(args, name) is not None
    }
    try:
        return RunConfig(
            command=command,
            ids=tuple(getattr(args, "ids", ())),
            ranges=ranges,
            mode=Mode(args.mode) if getattr(args, "mode", None) else None,
            digits=digits,
            trials=getattr(args, "trials", 200),
            seed=getattr(args, "seed", 0),
            jobs=jobs,
            chain=getattr(args, "chain", False),
            outside_domain=getattr(args, "outside_domain", False),
            out=args.out,
            output_format=args.output_format,
            verbose=args.verbose,
            sum_text=getattr(args, "sum_text", None),
            ratio=getattr(args, "ratio", None),
            n=args.n if command == "recognize" else 0,
            m=args.m if command == "recognize" else 0,
            start=getattr(args, "start", 0),
            end=getattr(args, "end", "n"),
            pfq_text=getattr(args, "pfq_text", None),
        )
    except OutOfDomain as exc:
        parser.error(str(exc))


def _write(config: RunConfig, text: str) -> None:
    if config.out is None:
        sys.stdout.write(text)
        return
    config.out.parent.mkdir(parents=True, exist_ok=True)
    config.out.write_text(text, encoding="utf-8")
    logger.info("Report written to %s", config.out)


def _emit(config: RunConfig, checks: list[dict[str, object]], lines: list[str]) -> None:
    if config.output_format == "text":
        _write(config, "".join(f"{line}\n" for line in lines))
        return
    report = {
        "run": {"command": config.command, "seed": config.seed, "digits": config.digits},
        "checks": checks,
    }
    _write(config, json.dumps(report, indent=2) + "\n")


def _format_params(params: dict[str, object]) -> str:
    return ",".join(f"{name}={value}" for name, value in params.items()) or "-"


def cmd_verify(config: RunConfig) -> int:
    """Run the selected identities and lemmas; exit 0 iff every check passes."""

    identities = tuple(i for i in config.ids if i in IDENTITIES)
    lemmas = tuple(i for i in config.ids if i in LEMMAS)
    unknown = [i for i in config.ids if i not in IDENTITIES and i not in LEMMAS]
    if unknown:
        raise UnknownIdentity(", ".join(unknown))
    grid = GridConfig(
        identities=identities if config.ids else tuple(IDENTITIES),
        lemmas=lemmas if config.ids else tuple(LEMMAS),
        ranges=config.ranges,
        mode=config.mode,
        digits=config.digits,
        chain=config.chain,
        outside_domain=config.outside_domain,
        jobs=config.jobs,
    )
    reports = verify_all(grid, enable_progress=not config.verbose)
    if not reports:
        logger.error("No grid points fall inside the requested ranges.")
        return EXIT_USAGE
    records = [report.to_dict() for report in reports]
    lines = [
        f"{record['id']} {_format_params(record['params'])} {record['status']} "
        f"lhs={record['lhs']} rhs={record['rhs']}"
        for record in records
    ]
    _emit(config, records, lines)
    return EXIT_OK if all(report.passed for report in reports) else EXIT_FAILED


def cmd_recognize(config: RunConfig) -> int:
    """Print prefactor, series, classification and, for a finite range, the exact sum."""

    params: dict[str, object]
    if config.ratio is not None:
        found = recognize_ratio(*config.ratio)
        params = {"ratio": [[str(c) for c in side] for side in config.ratio]}
    else:
        term = parse_term_spec(config.sum_text or "")
        end = config.end
        if isinstance(end, str):
            end = {"n": config.n, "inf": None}[end]
        found = recognize(SumSpec(term, config.start, end, n=config.n, m=config.m))
        params = {"n": config.n, "m": config.m, "from": config.start, "to": config.end}
    info = classify(found.series)
    record: dict[str, object] = {
        "id": "recognize",
        "params": params,
        "prefactor": str(found.prefactor),
        "series": str(found.series),
        "upper": [str(a) for a in found.series.upper],
        "lower": [str(b) for b in found.series.lower],
        "arg": str(found.series.arg),
        "reversed": found.reversed,
        "truncate_at": found.truncate_at,
        "terminating": info.terminating,
        "balance": str(info.balance),
        "saalschutzian": info.saalschutzian,
        "status": "pass",
    }
    lines = [
        f"prefactor {found.prefactor}",
        f"series {found.series}",
        f"classification terminating={info.terminating} truncate_at={found.truncate_at} "
        f"balance={info.balance} saalschutzian={info.saalschutzian}",
    ]
    if found.truncate_at is not None or info.terminating:
        total = found.total()
        record["sum"] = str(total)
        lines.append(f"sum {total}")
    _emit(config, [record], lines)
    return EXIT_OK


def cmd_eval(config: RunConfig) -> int:
    """Evaluate a pFq literal exactly when it terminates, numerically otherwise."""

    series = PFQ.from_literal(config.pfq_text or "")
    if classify(series).terminating:
        mode, value = Mode.EXACT, str(direct_sum(series))
    else:
        digits = config.working_digits
        mode, value = Mode.NUMERIC, mp.nstr(eval_pfq_numeric(series, digits), digits)
    record = {
        "id": "eval",
        "params": {"pfq": str(series)},
        "mode": str(mode),
        "value": value,
        "status": "pass",
    }
    _emit(config, [record], [value])
    return EXIT_OK


def cmd_rules(config: RunConfig) -> int:
    """List the rule registry or run the randomized oracle on selected rules."""

    if config.command == "rules-list":
        records = [
            {"id": rule.id, "citation": rule.citation, "numeric": rule.numeric}
            for rule in RULES.values()
        ]
        _emit(config, records, [f"{rule.id}\t{rule.citation}" for rule in RULES.values()])
        return EXIT_OK

    rule_ids = config.ids or tuple(RULES)
    for rule_id in rule_ids:
        get_rule(rule_id)
    digits = config.working_digits
    records: list[dict[str, object]] = []
    lines: list[str] = []
    passed = 0
    for rule_id in rule_ids:
        checks = check_rule(rule_id, trials=config.trials, seed=config.seed, digits=digits)
        for check in checks:
            record: dict[str, object] = {
                "id": check.rule_id,
                "params": {"trial": check.trial, "series": str(check.series)},
                "mode": "exact" if check.exact else "numeric",
                "lhs": _value_text(check.lhs, digits),
                "rhs": _value_text(check.rhs, digits),
                "status": check.status,
            }
            if check.abs_diff is not None:
                record["abs_diff"] = mp.nstr(check.abs_diff, 5)
            if check.error:
                record["message"] = check.error
            if check.shrunk is not None:
                record["counterexample"] = str(check.shrunk)
            records.append(record)
            if check.status != "pass":
                line = f"{check.rule_id} trial {check.trial} {check.status}: {check.series}"
                if check.shrunk is not None:
                    line += f" (minimal: {check.shrunk})"
                lines.append(line)
        rule_passed = sum(check.status == "pass" for check in checks)
        passed += rule_passed
        lines.append(f"{rule_id} {rule_passed}/{len(checks)} trials passed")
    logger.info("%d/%d rule trials passed", passed, len(records))
    _emit(config, records, lines)
    return EXIT_OK if passed == len(records) else EXIT_FAILED


def _value_text(value: object, digits: int) -> str | None:
    if value is None:
        return None
    if isinstance(value, (int, Fraction)):
        return str(value)
    return mp.nstr(value, digits)


COMMANDS = {
    "verify": cmd_verify,
    "recognize": cmd_recognize,
    "eval": cmd_eval,
    "rules-check": cmd_rules,
    "rules-list": cmd_rules,
}


def main(argv: Sequence[str] | None = None) -> None:
    """Execute one CLI command and exit with its status.

    Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage, parse and
    unknown-id errors, 3 when a sum is not hypergeometric or a series diverges.
    """
    config = parse_args(argv)
    configure_logging(config.verbose)
    logger.info("Running %s", config.command)
    try:
        code = COMMANDS[config.command](config)
    except (UnknownIdentity, UnknownLemma, UnknownRule) as exc:
        logger.error("Unknown id: %s", exc.args[0] if exc.args else exc)
        code = EXIT_USAGE
    except (TermSyntaxError, OutOfDomain, DomainError) as exc:
        logger.error("Invalid input: %s", exc)
        code = EXIT_USAGE
    except (NotHypergeometric, IrrationalRoots, Divergent) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        code = EXIT_NOT_HYPERGEOMETRIC
    except HyperBinomError as exc:
        logger.error("%s failed: %s", config.command, exc)
        code = EXIT_FAILED
    sys.exit(code)


if __name__ == "__main__":  # pragma: no cover - CLI entry point
    main()
