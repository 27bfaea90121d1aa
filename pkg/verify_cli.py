from contextlib import redirect_stderr, redirect_stdout
import io
import json
import math
import os
from pathlib import Path
import tempfile
from unittest.mock import patch

import main
from report_exporter import KIND_C_FORM, make_report
from verification_suites import SuiteOutcome


def _clean_env(**overrides: str) -> dict[str, str]:
    env = {key: value for key, value in os.environ.items() if not key.startswith("RENYI_EPI_")}
    env.update(overrides)
    return env


def _run(argv: list[str], **env: str) -> tuple[int, str, str]:
    stdout, stderr = io.StringIO(), io.StringIO()
    with patch.dict(os.environ, _clean_env(**env), clear=True), patch("main.load_dotenv"):
        with redirect_stdout(stdout), redirect_stderr(stderr):
            code = main.main(argv)
    return code, stdout.getvalue(), stderr.getvalue()


def test_constants_csv() -> None:
    code, out, _ = _run(["constants", "--r", "2", "--m", "2", "--format", "csv"])
    assert code == main.EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "r,m,kind,value,alpha"
    assert "2,2,RamSasonC,0.84375," in lines
    print("SUCCESS: constants --format csv prints the constant table.")


def test_entropy_json() -> None:
    code, out, _ = _run(
        ["entropy", "--density", '{"kind": "uniform", "a": 0, "b": 2}', "--p", "0.5,2,5,shannon", "--grid-n", "4096"]
    )
    assert code == main.EXIT_OK
    payload = json.loads(out)
    assert payload["command"] == "entropy" and payload["grid_n"] == 4096
    values = [row["h"] for row in payload["results"]]
    assert len(values) == 4
    assert all(abs(value - math.log(2.0)) < 1e-8 for value in values)
    assert payload["results"][3]["p"] == "shannon"
    print("SUCCESS: entropy reports log 2 for Uniform(0, 2) at every order.")


def test_usage_errors() -> None:
    code, _, err = _run(["entropy", "--density", "{not json", "--p", "2"])
    assert code == main.EXIT_USAGE and "not valid JSON" in err
    code, _, err = _run(["verify", "--suite", "nope"])
    assert code == main.EXIT_USAGE and "unknown suite" in err
    code, _, err = _run(["verify", "--grid-n", "1000"])
    assert code == main.EXIT_USAGE and "Invalid configuration:" in err
    code, _, _ = _run(["entropy", "--density", '{"kind": "normal", "sigma2": 1}', "--p", "two"])
    assert code == main.EXIT_USAGE
    code, _, _ = _run([])
    assert code == main.EXIT_USAGE
    code, _, err = _run(["entropy", "--density", '{"kind": "normal", "sigma2": 1}', "--p", "0"])
    assert code == main.EXIT_USAGE and "Error [domain]" in err
    print("SUCCESS: malformed input exits with code 2.")


def test_failed_checks_exit_one() -> None:
    failing = make_report(KIND_C_FORM, 1.0, 2.0, tolerance=1e-6, inputs={"case": "failing"})
    with tempfile.TemporaryDirectory() as tmp_dir:
        with patch("main.run_suite", return_value=SuiteOutcome(reports=[failing])):
            code, _, err = _run(["verify", "--output", "failing.json"], RENYI_EPI_OUTPUT_DIR=tmp_dir)
        assert code == main.EXIT_CHECK_FAILED
        assert "1 checks, 1 failed" in err
        payload = json.loads((Path(tmp_dir) / "failing.json").read_text(encoding="utf-8"))
        assert payload["summary"]["failed"] == 1

        with patch("main.run_suite", return_value=SuiteOutcome(errors=["dct: [grid_coverage] too wide"])):
            code, _, _ = _run(["verify", "--output", "errors.json"], RENYI_EPI_OUTPUT_DIR=tmp_dir)
        assert code == main.EXIT_CHECK_FAILED
    print("SUCCESS: failing checks and task errors exit with code 1.")


def test_quick_suite_passes() -> None:
    with tempfile.TemporaryDirectory() as tmp_dir:
        code, _, err = _run(["verify", "--suite", "quick", "--output", "quick.json"], RENYI_EPI_OUTPUT_DIR=tmp_dir)
        assert code == main.EXIT_OK, err
        target = Path(tmp_dir) / "quick.json"
        assert target.exists()
        payload = json.loads(target.read_text(encoding="utf-8"))
    assert payload["settings"]["suite"] == "quick"
    assert payload["summary"]["failed"] == 0 and payload["summary"]["checks"] > 0
    print("SUCCESS: the quick suite passes end to end.")


def test_report_aggregates_directory() -> None:
    passing = make_report(KIND_C_FORM, 2.0, 1.0, tolerance=1e-6, inputs={"case": "passing"}, r=2.0, m=2)
    with tempfile.TemporaryDirectory() as tmp_dir:
        with patch("main.run_suite", return_value=SuiteOutcome(reports=[passing])):
            code, _, _ = _run(["verify", "--output", "one.json"], RENYI_EPI_OUTPUT_DIR=tmp_dir)
        assert code == main.EXIT_OK
        (Path(tmp_dir) / "garbage.json").write_text("[1, 2", encoding="utf-8")

        code, out, err = _run(["report"], RENYI_EPI_OUTPUT_DIR=tmp_dir)
        assert code == main.EXIT_OK
        assert out.splitlines() == ["kind,r,m,alpha,c,lhs,rhs,gap,pass", "CForm,2,2,,,2,1,1,True"]
        assert "Skipping garbage.json" in err
        assert "[report] 1 rows, 0 failed" in err

        code, _, _ = _run(["report", tmp_dir, "--output", "all.csv"], RENYI_EPI_OUTPUT_DIR=tmp_dir)
        assert code == main.EXIT_OK
        assert (Path(tmp_dir) / "all.csv").read_text(encoding="utf-8").startswith("kind,r,m")
    print("SUCCESS: report aggregates JSON reports and skips unreadable files.")


if __name__ == "__main__":
    test_constants_csv()
    test_entropy_json()
    test_usage_errors()
    test_failed_checks_exit_one()
    test_quick_suite_passes()
    test_report_aggregates_directory()
