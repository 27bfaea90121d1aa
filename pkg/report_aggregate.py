from __future__ import annotations

import json
from pathlib import Path
import sys
from typing import Any, Iterable

import pandas as pd

from report_exporter import CSV_COLUMNS, CSV_FLOAT_FORMAT


def _load_json(path: Path) -> dict:
    try:
        parsed = json.loads(path.read_text(encoding="utf-8"))
    except Exception as exc:  # noqa: BLE001
        print(f"Skipping {path.name}: {exc}", file=sys.stderr)
        return {}
    return parsed if isinstance(parsed, dict) else {}


def collect_files(paths: Iterable[Path]) -> list[Path]:
    files: list[Path] = []
    for path in paths:
        if path.is_dir():
            files.extend(sorted(path.glob("*.json"), key=lambda item: item.name))
        elif path.exists():
            files.append(path)
        else:
            print(f"Skipping {path}: not found", file=sys.stderr)
    return files


def _number(value: Any) -> float | None:
    if value is None:
        return None
    if isinstance(value, str):
        # non-finite floats are stored as "inf", "-inf" or "nan"
        try:
            return float(value)
        except ValueError:
            return None
    return float(value)


def _is_report_record(record: Any) -> bool:
    return isinstance(record, dict) and "kind" in record and "gap" in record and "pass" in record


def _passed(record: dict) -> bool:
    """The stored numeric verdict, failed as well when the record is flagged inconsistent."""
    details = record.get("details")
    inconsistent = isinstance(details, dict) and details.get("consistent") is False
    return bool(record["pass"]) and not inconsistent


def rows_from_document(document: dict) -> list[dict[str, Any]]:
    rows = []
    for record in document.get("results") or []:
        if not _is_report_record(record):
            continue
        rows.append(
            {
                "kind": str(record["kind"]),
                "r": _number(record.get("r")),
                "m": record.get("m"),
                "alpha": _number(record.get("alpha")),
                "c": _number(record.get("c")),
                "lhs": _number(record.get("lhs")),
                "rhs": _number(record.get("rhs")),
                "gap": _number(record.get("gap")),
                "pass": _passed(record),
            }
        )
    return rows


def aggregate_reports(paths: Iterable[Path]) -> pd.DataFrame:
    rows: list[dict[str, Any]] = []
    for path in collect_files(paths):
        document = _load_json(path)
        if not document:
            continue
        rows.extend(rows_from_document(document))
    frame = pd.DataFrame(rows, columns=list(CSV_COLUMNS))
    if frame.empty:
        return frame
    frame["m"] = frame["m"].astype("Int64")
    return frame.sort_values(["kind", "r", "m", "alpha", "c"], kind="mergesort", na_position="first").reset_index(drop=True)


def render_aggregate(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


def failed_count(frame: pd.DataFrame) -> int:
    if frame.empty:
        return 0
    return int((~frame["pass"].astype(bool)).sum())


def summarize(frame: pd.DataFrame) -> dict[str, int]:
    total = int(len(frame))
    failed = failed_count(frame)
    return {"total": total, "passed": total - failed, "failed": failed}

