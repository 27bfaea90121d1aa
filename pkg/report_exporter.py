from __future__ import annotations

from dataclasses import dataclass, field
import hashlib
import json
import math
from pathlib import Path
import sys
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
import pandas as pd

from density_specs import describe_value

SCHEMA_VERSION = "1.0"
TOOL_NAME = "renyi-epi"
TOOL_VERSION = "0.1.0"

CSV_COLUMNS = ("kind", "r", "m", "alpha", "c", "lhs", "rhs", "gap", "pass")
CSV_FLOAT_FORMAT = "%.12g"

KIND_INFO_INEQ = "InfoIneq"
KIND_DCT = "DCT"
KIND_DCT_M = "DCT_m"
KIND_C_FORM = "CForm"
KIND_ALPHA_FORM = "AlphaForm"
KIND_GENERAL_FORM = "GeneralForm"
KIND_CHARACT_RHS = "CharactRHS"
KIND_MONOTONICITY = "Monotonicity"
KIND_SHIFTED_MONOTONICITY = "ShiftedMonotonicity"
KIND_VARENTROPY = "Varentropy"
KIND_CONCAVITY = "Concavity"
KIND_DERIVATIVE_IDENTITY = "DerivativeIdentity"
KIND_PUSHFORWARD = "Pushforward"
KIND_INVARIANCE = "Invariance"
KIND_ROTATION = "Rotation"
KIND_OPTIMIZER = "Optimizer"
KIND_ENTROPY_ORACLE = "EntropyOracle"

REPORT_KINDS = frozenset(
    {
        KIND_INFO_INEQ,
        KIND_DCT,
        KIND_DCT_M,
        KIND_C_FORM,
        KIND_ALPHA_FORM,
        KIND_GENERAL_FORM,
        KIND_CHARACT_RHS,
        KIND_MONOTONICITY,
        KIND_SHIFTED_MONOTONICITY,
        KIND_VARENTROPY,
        KIND_CONCAVITY,
        KIND_DERIVATIVE_IDENTITY,
        KIND_PUSHFORWARD,
        KIND_INVARIANCE,
        KIND_ROTATION,
        KIND_OPTIMIZER,
        KIND_ENTROPY_ORACLE,
    }
)


@dataclass(frozen=True)
class EpiReport:
    """One inequality check. lhs is the side claimed to be larger, so gap = lhs - rhs."""

    kind: str
    lhs: float
    rhs: float
    gap: float
    passed: bool
    tolerance: float
    inputs_digest: str
    r: float | None = None
    m: int | None = None
    alpha: float | None = None
    c: float | None = None
    details: Mapping[str, Any] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()

    def to_record(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "inputs_digest": self.inputs_digest,
            "r": jsonable(self.r),
            "m": self.m,
            "alpha": jsonable(self.alpha),
            "c": jsonable(self.c),
            "lhs": jsonable(self.lhs),
            "rhs": jsonable(self.rhs),
            "gap": jsonable(self.gap),
            "pass": self.passed,
            "tolerance": jsonable(self.tolerance),
            "details": jsonable(dict(self.details)),
            "warnings": list(self.warnings),
        }

    def to_row(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "r": self.r,
            "m": self.m,
            "alpha": self.alpha,
            "c": self.c,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "pass": not report_failed(self),
        }


@dataclass(frozen=True)
class ReportDocument:
    name: str
    filename: str
    content: str
    output_path: Path | None


def jsonable(value: Any) -> Any:
    """Convert numbers, densities and exponents into plain JSON values; non-finite floats become strings."""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        number = float(value)
        if math.isnan(number):
            return "nan"
        if math.isinf(number):
            return "inf" if number > 0 else "-inf"
        return number
    if isinstance(value, Mapping):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, np.ndarray):
        return [jsonable(item) for item in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [jsonable(item) for item in value]
    return jsonable(describe_value(value))


def inputs_digest(inputs: Mapping[str, Any]) -> str:
    canonical = json.dumps(jsonable(inputs), sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def make_report(
    kind: str,
    lhs: float,
    rhs: float,
    *,
    tolerance: float,
    inputs: Mapping[str, Any],
    r: float | None = None,
    m: int | None = None,
    alpha: float | None = None,
    c: float | None = None,
    details: Mapping[str, Any] | None = None,
    warnings: Iterable[str] = (),
) -> EpiReport:
    if kind not in REPORT_KINDS:
        raise ValueError(f"unknown report kind {kind!r}")
    lhs, rhs = float(lhs), float(rhs)
    with np.errstate(invalid="ignore"):
        gap = lhs - rhs
    return EpiReport(
        kind=kind,
        lhs=lhs,
        rhs=rhs,
        gap=gap,
        passed=bool(gap >= -tolerance),
        tolerance=float(tolerance),
        inputs_digest=inputs_digest({"kind": kind, **inputs}),
        r=None if r is None else float(r),
        m=m,
        alpha=None if alpha is None else float(alpha),
        c=None if c is None else float(c),
        details=dict(details or {}),
        warnings=tuple(warnings),
    )


def make_accuracy_report(
    kind: str,
    error: float,
    bound: float,
    *,
    inputs: Mapping[str, Any],
    **extra: Any,
) -> EpiReport:
    """Report for checks that measure an error against an allowed bound (lhs = bound, rhs = error)."""
    return make_report(kind, bound, error, tolerance=0.0, inputs=inputs, **extra)


def report_failed(report: EpiReport) -> bool:
    return not report.passed or report.details.get("consistent") is False


def sort_reports(reports: Iterable[EpiReport]) -> list[EpiReport]:
    return sorted(reports, key=lambda report: (report.kind, report.inputs_digest))


def build_payload(
    command: str,
    results: Sequence[Any],
    *,
    grid_n: int,
    seed: int,
    settings: Mapping[str, Any] | None = None,
    warnings: Iterable[str] = (),
) -> dict[str, Any]:
    records = [item.to_record() if isinstance(item, EpiReport) else jsonable(item) for item in results]
    reports = [item for item in results if isinstance(item, EpiReport)]
    failed = sum(1 for report in reports if report_failed(report))
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": TOOL_NAME,
        "tool_version": TOOL_VERSION,
        "command": command,
        "grid_n": grid_n,
        "seed": seed,
        "settings": jsonable(dict(settings or {})),
        "summary": {"total": len(records), "checks": len(reports), "passed": len(reports) - failed, "failed": failed},
        "warnings": sorted(set(warnings)),
        "results": records,
    }


def render_json(payload: Mapping[str, Any]) -> str:
    return json.dumps(jsonable(payload), ensure_ascii=False, indent=2, allow_nan=False) + "\n"


def render_csv(rows: Sequence[Mapping[str, Any]], columns: Sequence[str] = CSV_COLUMNS) -> str:
    frame = pd.DataFrame(list(rows), columns=list(columns))
    return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


def rows_for_csv(results: Sequence[Any]) -> list[dict[str, Any]]:
    return [item.to_row() if isinstance(item, EpiReport) else dict(item) for item in results]


def render_document(
    payload: Mapping[str, Any],
    results: Sequence[Any],
    output_format: str,
    output_path: Path | None,
    *,
    columns: Sequence[str] = CSV_COLUMNS,
) -> ReportDocument:
    command = str(payload.get("command") or "report")
    if output_format == "csv":
        content = render_csv(rows_for_csv(results), columns)
    else:
        content = render_json(payload)
    filename = output_path.name if output_path is not None else f"{command}.{output_format}"
    return ReportDocument(
        name=f"{command} report",
        filename=filename,
        content=content,
        output_path=output_path,
    )


def write_document(document: ReportDocument) -> Path | None:
    if document.output_path is None:
        sys.stdout.write(document.content)
        return None
    document.output_path.parent.mkdir(parents=True, exist_ok=True)
    document.output_path.write_text(document.content, encoding="utf-8")
    return document.output_path
