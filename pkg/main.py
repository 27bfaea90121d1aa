from __future__ import annotations

import argparse
from dataclasses import asdict, replace
import math
from pathlib import Path
import sys
from typing import Any, Sequence

from dotenv import load_dotenv

from config import Config, OUTPUT_FORMATS, validate_config
from density_specs import density_label, density_to_spec, parse_density_argument
from entropy import SHANNON, renyi_entropy
from errors import ERROR_USAGE, EpiError
from exponents import constant_rows
import report_aggregate
from report_exporter import build_payload, render_document, write_document
from verification_suites import (
    DEFAULT_SUITE_ID,
    SUITES,
    SuiteOutcome,
    SuiteSettings,
    build_optimizer_tasks,
    run_suite,
    run_tasks,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

DEFAULT_CONSTANT_ORDERS = (0.3, 0.5, 0.8, 1.5, 2.0, 4.0)
DEFAULT_CONSTANT_MS = (2, 3)
DEFAULT_OPTIMIZER_ORDERS = (1.5, 2.0, 4.0)

CONSTANT_COLUMNS = ("r", "m", "kind", "value", "alpha")
ENTROPY_COLUMNS = ("density", "p", "h", "entropy_power", "warnings")


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise EpiError(ERROR_USAGE, message)


def _float_list(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _order_list(text: str) -> list[float | str]:
    orders: list[float | str] = []
    for item in text.split(","):
        item = item.strip().lower()
        if not item:
            continue
        if item == SHANNON:
            orders.append(SHANNON)
            continue
        try:
            orders.append(float(item))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"orders are numbers or {SHANNON!r}, got {item!r}") from exc
    return orders


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid-n", type=int, help="Quadrature resolution (power of two >= 1024).")
    common.add_argument("--format", choices=OUTPUT_FORMATS, dest="output_format", help="Report format.")
    common.add_argument("--output", type=Path, help="Report file; relative names resolve under the output directory.")
    common.add_argument("--tol-power", type=float, help="Relative tolerance of entropy power forms.")
    common.add_argument("--tol-nats", type=float, help="Tolerance (nats) of entropy difference forms.")
    common.add_argument("--tol-info", type=float, help="Tolerance of the information inequality and orderings.")
    common.add_argument("--workers", type=int, help="Thread pool size of the suite runner.")
    common.add_argument("--seed", type=int, help="Seed of the random sanity samplers.")

    parser = _ArgumentParser(description="Rényi entropies and entropy power inequalities, checked by quadrature.")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    constants = commands.add_parser("constants", parents=[common], help="Table of the entropy power constants.")
    constants.add_argument("--r", type=_float_list, help="Comma-separated orders.")
    constants.add_argument("--m", type=_int_list, help="Comma-separated numbers of summands.")
    constants.add_argument("--alpha", type=float, default=0.5, help="Exponent of the general constants.")

    entropy = commands.add_parser("entropy", parents=[common], help="Rényi entropies and entropy powers.")
    entropy.add_argument("--density", action="append", required=True, help="JSON density spec. Repeatable.")
    entropy.add_argument("--p", type=_order_list, required=True, help=f"Comma-separated orders ({SHANNON} allowed).")

    verify = commands.add_parser("verify", parents=[common], help="Run a verification suite.")
    verify.add_argument("--suite", default=DEFAULT_SUITE_ID, help=f"One of: {', '.join(sorted(SUITES))}.")

    optimize = commands.add_parser("optimize", parents=[common], help="Simplex reproductions of the constants.")
    optimize.add_argument("--r", type=_float_list, help="Comma-separated orders > 1.")

    report = commands.add_parser("report", parents=[common], help="Aggregate JSON reports into one CSV.")
    report.add_argument("paths", nargs="*", type=Path, help="JSON files or directories (default: output directory).")
    return parser


def resolve_config(args: argparse.Namespace, base: Config | None = None) -> Config:
    config = base or Config.from_env()
    overrides = {
        "grid_n": args.grid_n,
        "output_format": args.output_format,
        "tolerance_power": args.tol_power,
        "tolerance_nats": args.tol_nats,
        "tolerance_info": args.tol_info,
        "workers": args.workers,
        "seed": args.seed,
    }
    return replace(config, **{key: value for key, value in overrides.items() if value is not None})


def resolve_output(config: Config, output: Path | None) -> Path | None:
    if output is None:
        return None
    return output if output.is_absolute() else config.output_dir / output


def _settings(config: Config) -> SuiteSettings:
    return SuiteSettings(
        grid_n=config.grid_n,
        tolerance_power=config.tolerance_power,
        tolerance_nats=config.tolerance_nats,
        tolerance_info=config.tolerance_info,
        seed=config.seed,
    )


def _emit(
    command: str,
    results: Sequence[Any],
    config: Config,
    output: Path | None,
    *,
    settings: dict[str, Any] | None = None,
    warnings: Sequence[str] = (),
    columns: Sequence[str] | None = None,
) -> None:
    payload = build_payload(command, results, grid_n=config.grid_n, seed=config.seed, settings=settings, warnings=warnings)
    extra = {"columns": columns} if columns is not None else {}
    document = render_document(payload, results, config.output_format, resolve_output(config, output), **extra)
    path = write_document(document)
    if path is not None:
        print(f"Wrote {document.name} to {path}", file=sys.stderr)


def run_constants(args: argparse.Namespace, config: Config) -> int:
    orders = args.r or list(DEFAULT_CONSTANT_ORDERS)
    ms = args.m or list(DEFAULT_CONSTANT_MS)
    rows = constant_rows(orders, ms, args.alpha)
    _emit(
        "constants",
        rows,
        config,
        args.output,
        settings={"r": orders, "m": ms, "alpha": args.alpha},
        columns=CONSTANT_COLUMNS,
    )
    return EXIT_OK


def run_entropy(args: argparse.Namespace, config: Config) -> int:
    parts = [parse_density_argument(text, grid_n=config.grid_n) for text in args.density]
    rows = []
    for part in parts:
        for order in args.p:
            value = renyi_entropy(part, order, grid_n=config.grid_n)
            rows.append(
                {
                    "density": density_label(part),
                    "spec": density_to_spec(part),
                    "p": order,
                    "h": value.nats,
                    "entropy_power": math.exp(2.0 * value.nats),
                    "warnings": "; ".join(value.warnings),
                }
            )
    warnings = [row["warnings"] for row in rows if row["warnings"]]
    _emit("entropy", rows, config, args.output, warnings=warnings, columns=ENTROPY_COLUMNS)
    return EXIT_OK


def _finish_checks(
    command: str,
    outcome: SuiteOutcome,
    config: Config,
    output: Path | None,
    settings: dict[str, Any],
) -> int:
    _emit(command, outcome.reports, config, output, settings=settings, warnings=outcome.errors)
    print(f"[{command}] {len(outcome.reports)} checks, {outcome.failed} failed", file=sys.stderr)
    return EXIT_CHECK_FAILED if outcome.failed else EXIT_OK


def run_verify(args: argparse.Namespace, config: Config) -> int:
    outcome = run_suite(args.suite, _settings(config), workers=config.workers, verbose=config.verbose)
    settings = {"suite": args.suite, **asdict(_settings(config))}
    return _finish_checks("verify", outcome, config, args.output, settings)


def run_optimize(args: argparse.Namespace, config: Config) -> int:
    orders = tuple(args.r or DEFAULT_OPTIMIZER_ORDERS)
    tasks = build_optimizer_tasks(_settings(config), orders=orders)
    outcome = run_tasks(tasks, workers=config.workers, tag="optimize", verbose=config.verbose)
    return _finish_checks("optimize", outcome, config, args.output, {"r": list(orders), "seed": config.seed})


def run_report(args: argparse.Namespace, config: Config) -> int:
    paths = args.paths or [config.output_dir]
    frame = report_aggregate.aggregate_reports(paths)
    content = report_aggregate.render_aggregate(frame)
    output = resolve_output(config, args.output)
    if output is None:
        sys.stdout.write(content)
    else:
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(content, encoding="utf-8")
        print(f"Wrote aggregate report to {output}", file=sys.stderr)
    summary = report_aggregate.summarize(frame)
    print(f"[report] {summary['total']} rows, {summary['failed']} failed", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "constants": run_constants,
    "entropy": run_entropy,
    "verify": run_verify,
    "optimize": run_optimize,
    "report": run_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    load_dotenv()
    try:
        args = build_parser().parse_args(argv)
    except EpiError as exc:
        print(f"Usage error: {exc.message}", file=sys.stderr)
        return EXIT_USAGE

    config = resolve_config(args)
    problems = validate_config(config)
    if problems:
        print("Invalid configuration:", file=sys.stderr)
        for problem in problems:
            print(f"- {problem}", file=sys.stderr)
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](args, config)
    except EpiError as exc:
        print(f"Error [{exc.code}]: {exc.message}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
