import os
from unittest.mock import patch

from errors import ERROR_USAGE, EpiError
from verification_suites import (
    SUITES,
    SuiteSettings,
    build_epi_tasks,
    build_information_tasks,
    get_suite,
    run_tasks,
)

SETTINGS = SuiteSettings(grid_n=16384)


def _defaults_only() -> dict[str, str]:
    return {key: value for key, value in os.environ.items() if not key.startswith("RENYI_EPI_")}


def test_suite_registry() -> None:
    assert {"default", "quick", "optimizer"} <= set(SUITES)
    assert get_suite(" quick ").id == "quick"
    try:
        get_suite("nope")
    except EpiError as exc:
        assert exc.code == ERROR_USAGE
    else:
        raise AssertionError("Expected a usage error for an unknown suite")
    print("SUCCESS: suites resolve by id.")


def test_information_tasks_complete_without_errors() -> None:
    with patch.dict(os.environ, _defaults_only(), clear=True):
        outcome = run_tasks(build_information_tasks(SETTINGS), workers=4, verbose=False)
    assert outcome.errors == [], outcome.errors
    assert outcome.reports
    print("SUCCESS: every information and invariance task of the default suite completes.")


def test_small_order_epi_tasks_complete_without_errors() -> None:
    # r < 1 widens escort windows the most
    with patch.dict(os.environ, _defaults_only(), clear=True):
        outcome = run_tasks(build_epi_tasks(SETTINGS, form_orders=(0.3, 0.5)), workers=4, verbose=False)
    assert outcome.errors == [], outcome.errors
    assert outcome.reports
    print("SUCCESS: every DCT and r < 1 form task of the default suite completes.")


if __name__ == "__main__":
    test_suite_registry()
    test_information_tasks_complete_without_errors()
    test_small_order_epi_tasks_complete_without_errors()
