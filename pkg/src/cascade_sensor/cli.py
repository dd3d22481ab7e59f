"""Command-line front end.

Subcommands: ``sweep`` and ``scaling`` run the experiment described by a
JSON spec file, ``validate`` schema-checks a config without running it, and
``fisher`` evaluates the Fisher matrix of a single sensor configuration.

Exit codes: 0 on success, 1 for configuration problems (bad flags, missing
or invalid files), 2 for runtime failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from numpy.linalg import LinAlgError

from cascade_sensor.experiments import (
    SweepMode,
    TimeBudgetExceeded,
    run_scaling_study,
    run_transmission_sweep,
    spec_from_dict,
    validate_config,
)
from cascade_sensor.lattice import config_from_dict
from cascade_sensor.metrology import (
    FisherStepError,
    IndistinguishableParametersError,
    crb,
    fisher_matrix,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    """Argument errors are configuration errors, so exit 1, not argparse's 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="cascade-sensor",
        description="Simulate and optimize cascaded multiphase fiber sensors.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_common(p: _Parser) -> None:
        p.add_argument("--config", required=True, help="JSON spec file")
        p.add_argument("--out", help="override the output path in the spec")
        p.add_argument("--seed", type=int, help="override the root seed")
        p.add_argument(
            "--threads", type=int, default=1, help="worker threads (default 1)"
        )
        p.add_argument(
            "--max-minutes",
            type=float,
            help="wall-clock budget; unfinished work aborts a sweep and "
            "truncates a scaling study",
        )
        p.add_argument(
            "--no-header-timestamp",
            action="store_true",
            help="omit timestamp and wall-clock fields for byte-stable output",
        )

    add_common(sub.add_parser("sweep", help="optimize across a transmission grid"))
    add_common(sub.add_parser("scaling", help="photon cost versus segment count"))

    validate = sub.add_parser("validate", help="schema-check a config file")
    validate.add_argument("--config", required=True, help="JSON file to check")

    fisher = sub.add_parser(
        "fisher", help="Fisher matrix and variance bounds for one configuration"
    )
    fisher.add_argument("--config", required=True, help="sensor config JSON")
    fisher.add_argument("--out", help="write the result JSON here instead of stdout")
    return parser


def _load_json(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(
            f"malformed JSON in {path} at line {exc.lineno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ValueError("top-level JSON value must be an object")
    return data


def _run_experiment(args: argparse.Namespace, expected: SweepMode) -> int:
    try:
        spec = spec_from_dict(_load_json(args.config))
        if spec.mode is not expected:
            raise ValueError(
                f"spec mode is {spec.mode.value!r}; this subcommand needs "
                f"{expected.value!r}"
            )
        if args.out is not None:
            spec = replace(spec, output=args.out)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    runner = (
        run_transmission_sweep
        if expected is SweepMode.TRANSMISSION_SWEEP
        else run_scaling_study
    )
    try:
        records = runner(
            spec,
            root_seed=args.seed,
            threads=args.threads,
            max_minutes=args.max_minutes,
            suppress_timestamp=args.no_header_timestamp,
        )
    except TimeBudgetExceeded as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ValueError, RuntimeError, LinAlgError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    ok = sum(1 for r in records if r.status == "ok")
    print(
        f"wrote {len(records)} rows ({ok} ok, {len(records) - ok} divergent) "
        f"to {spec.output}"
    )
    return EXIT_OK


def _run_validate(args: argparse.Namespace) -> int:
    problems = validate_config(args.config)
    if problems:
        for problem in problems:
            print(problem, file=sys.stderr)
        return EXIT_CONFIG
    print(f"{args.config}: ok")
    return EXIT_OK


def _run_fisher(args: argparse.Namespace) -> int:
    try:
        config = config_from_dict(_load_json(args.config))
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = fisher_matrix(config)
        crb(result.matrix)
    except IndistinguishableParametersError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (FisherStepError, ValueError, RuntimeError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    text = json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.command == "sweep":
        return _run_experiment(args, SweepMode.TRANSMISSION_SWEEP)
    if args.command == "scaling":
        return _run_experiment(args, SweepMode.SCALING_STUDY)
    if args.command == "validate":
        return _run_validate(args)
    if args.command == "fisher":
        return _run_fisher(args)
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
