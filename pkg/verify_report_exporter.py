from contextlib import redirect_stderr, redirect_stdout
import io
import json
import math
from pathlib import Path
import tempfile

import densities
from exponents import Exponent
import report_aggregate
import report_exporter
from report_exporter import (
    KIND_C_FORM,
    KIND_ROTATION,
    KIND_VARENTROPY,
    build_payload,
    make_accuracy_report,
    make_report,
    render_document,
    report_failed,
    write_document,
)


def _reports() -> list[report_exporter.EpiReport]:
    return [
        make_report(KIND_C_FORM, 2.0, 1.5, tolerance=1e-6, inputs={"r": 2.0}, r=2.0, m=2, alpha=1.0, c=0.84375),
        make_report(KIND_VARENTROPY, 1.0, 1.5, tolerance=1e-6, inputs={"p": 2.0}, r=2.0),
        make_accuracy_report(KIND_ROTATION, math.inf, 1e-12, inputs={"lambda": 0.5}),
    ]


def test_report_sign_convention() -> None:
    passing, failing, accuracy = _reports()
    assert passing.gap == 0.5 and passing.passed
    assert failing.gap == -0.5 and not failing.passed
    assert accuracy.lhs == 1e-12 and accuracy.rhs == math.inf and not accuracy.passed
    boundary = make_report(KIND_C_FORM, 1.0, 1.0 + 1e-7, tolerance=1e-6, inputs={})
    assert boundary.passed
    try:
        make_report("Bogus", 1.0, 0.0, tolerance=0.0, inputs={})
    except ValueError as exc:
        assert "Bogus" in str(exc)
    else:
        raise AssertionError("Expected ValueError for an unknown report kind")
    print("SUCCESS: gap = lhs - rhs and pass means gap >= -tolerance.")


def test_consistency_flag_counts_as_failure() -> None:
    report = make_report(KIND_C_FORM, 1.0, 0.5, tolerance=0.0, inputs={}, details={"consistent": False})
    assert report.passed and report_failed(report)
    assert not report_failed(make_report(KIND_C_FORM, 1.0, 0.5, tolerance=0.0, inputs={}, details={"consistent": None}))
    print("SUCCESS: sign inconsistencies fail the report.")


def test_jsonable_and_digest() -> None:
    assert report_exporter.jsonable(math.inf) == "inf"
    assert report_exporter.jsonable(-math.inf) == "-inf"
    assert report_exporter.jsonable(math.nan) == "nan"
    assert report_exporter.jsonable(Exponent.of(2.0)) == 2.0
    assert report_exporter.jsonable(densities.normal(1.0)) == {"kind": "normal", "sigma2": 1.0, "mean": 0.0}

    first = report_exporter.inputs_digest({"f": densities.normal(1.0), "p": 2.0})
    second = report_exporter.inputs_digest({"p": 2.0, "f": densities.normal(1.0)})
    other = report_exporter.inputs_digest({"p": 3.0, "f": densities.normal(1.0)})
    assert first == second and first != other and len(first) == 16
    print("SUCCESS: non-finite values serialise as strings and digests are order independent.")


def test_payload_and_csv() -> None:
    reports = _reports()
    payload = build_payload("verify", reports, grid_n=16384, seed=7, settings={"suite": "quick"}, warnings=["b", "a", "b"])
    assert payload["tool"] == "renyi-epi"
    assert payload["summary"] == {"total": 3, "checks": 3, "passed": 1, "failed": 2}
    assert payload["warnings"] == ["a", "b"]
    assert payload["settings"] == {"suite": "quick"}
    assert payload["results"][2]["rhs"] == "inf"

    document = render_document(payload, reports, "json", None)
    assert document.filename == "verify.json"
    assert json.loads(document.content)["grid_n"] == 16384

    csv_document = render_document(payload, reports, "csv", None)
    lines = csv_document.content.splitlines()
    assert lines[0] == "kind,r,m,alpha,c,lhs,rhs,gap,pass"
    assert lines[1] == "CForm,2,2,1,0.84375,2,1.5,0.5,True"
    print("SUCCESS: payloads summarise checks and CSV uses the fixed column order.")


def test_write_document() -> None:
    payload = build_payload("constants", [{"r": 2.0, "value": 0.84375}], grid_n=1024, seed=1)
    with tempfile.TemporaryDirectory() as tmp_dir:
        target = Path(tmp_dir) / "nested" / "constants.json"
        document = render_document(payload, [{"r": 2.0, "value": 0.84375}], "json", target)
        assert write_document(document) == target
        assert target.read_text(encoding="utf-8") == document.content

    buffer = io.StringIO()
    with redirect_stdout(buffer):
        assert write_document(render_document(payload, [], "json", None)) is None
    assert json.loads(buffer.getvalue())["command"] == "constants"
    print("SUCCESS: documents are written to disk or stdout unchanged.")


def test_aggregate_reports() -> None:
    reports = _reports()
    with tempfile.TemporaryDirectory() as tmp_dir:
        folder = Path(tmp_dir)
        (folder / "b.json").write_text(json.dumps(build_payload("verify", reports, grid_n=1024, seed=1)), encoding="utf-8")
        (folder / "a.json").write_text(json.dumps(build_payload("verify", reports[:1], grid_n=1024, seed=1)), encoding="utf-8")
        (folder / "broken.json").write_text("{not json", encoding="utf-8")

        buffer = io.StringIO()
        with redirect_stderr(buffer):
            frame = report_aggregate.aggregate_reports([folder, folder / "missing.json"])
        assert "Skipping broken.json" in buffer.getvalue()
        assert "not found" in buffer.getvalue()

    assert list(frame.columns) == list(report_exporter.CSV_COLUMNS)
    assert list(frame["kind"]) == ["CForm", "CForm", "Rotation", "Varentropy"]
    assert math.isinf(frame.loc[2, "rhs"])
    assert report_aggregate.summarize(frame) == {"total": 4, "passed": 2, "failed": 2}
    assert report_aggregate.render_aggregate(frame).splitlines()[0] == "kind,r,m,alpha,c,lhs,rhs,gap,pass"
    assert report_aggregate.failed_count(report_aggregate.aggregate_reports([])) == 0
    print("SUCCESS: report files aggregate into one sorted table and unreadable files are skipped.")


def test_inconsistent_reports_fail_in_tables() -> None:
    flagged = make_report(KIND_C_FORM, 1.0, 0.5, tolerance=0.0, inputs={"w": [0.5, 0.5]}, r=2.0, m=2, details={"consistent": False})
    unflagged = make_report(KIND_C_FORM, 1.0, 0.5, tolerance=0.0, inputs={"w": [0.3, 0.7]}, r=2.0, m=2, details={"consistent": None})
    assert flagged.to_record()["pass"] is True
    assert flagged.to_row()["pass"] is False and unflagged.to_row()["pass"] is True

    with tempfile.TemporaryDirectory() as tmp_dir:
        folder = Path(tmp_dir)
        payload = build_payload("verify", [flagged, unflagged], grid_n=1024, seed=1)
        (folder / "weights.json").write_text(json.dumps(payload), encoding="utf-8")
        frame = report_aggregate.aggregate_reports([folder])
    assert sorted(frame["pass"].tolist()) == [False, True]
    assert report_aggregate.failed_count(frame) == 1
    print("SUCCESS: reports flagged inconsistent fail in CSV rows and aggregated tables.")


if __name__ == "__main__":
    test_report_sign_convention()
    test_consistency_flag_counts_as_failure()
    test_jsonable_and_digest()
    test_payload_and_csv()
    test_write_document()
    test_aggregate_reports()
    test_inconsistent_reports_fail_in_tables()
