import math

import densities
from epi_verify import (
    charact_rhs,
    characterization_check,
    dct_constant,
    dct_gap,
    dct_gap_m,
    epi_form_check,
    info_inequality_gap,
    equivalence_check,
    recipe_weights,
)
from errors import ERROR_DOMAIN, ERROR_INCONSISTENT_ORDERS, ERROR_PRECONDITION, EpiError
from exponents import (
    Exponent,
    WeightVector,
    alpha_li_two_variable,
    alpha_logconcave_two_variable,
    constant_general,
    constant_logconcave,
    constant_ram_sason,
    triple_from_lambda,
)
from report_exporter import KIND_ALPHA_FORM, KIND_C_FORM, KIND_GENERAL_FORM, report_failed

GRID_N = 16384


def _expect_error(code: str, function, *args, **kwargs) -> None:
    try:
        function(*args, **kwargs)
    except EpiError as exc:
        assert exc.code == code, exc.code
    else:
        raise AssertionError(f"Expected {code} from {function.__name__}{args}")


def test_information_inequality_equality_case() -> None:
    for f in (densities.normal(1.0), densities.exponential(1.0), densities.laplace(1.0)):
        for p in (0.5, 2.0, 3.0):
            report = info_inequality_gap(f, densities.escort(f, p), p, grid_n=GRID_N)
            assert report.passed
            assert abs(report.gap) <= 1e-6, (f, p, report.gap)
    print("SUCCESS: the information inequality is tight at the escort.")


def test_information_inequality_strict_cases() -> None:
    for f in (densities.normal(4.0), densities.laplace(1.0), densities.uniform(0.0, 1.0)):
        report = info_inequality_gap(f, densities.normal(1.0), 2.0, grid_n=GRID_N)
        assert report.passed and report.gap > 0, (f, report.gap)
    report = info_inequality_gap(densities.normal(1.0), densities.laplace(3.0), 0.5, grid_n=GRID_N)
    assert report.passed and report.gap > 0
    print("SUCCESS: the information inequality holds away from the escort.")


def test_dct_constant() -> None:
    expected = math.log(2.0) / 2.0 - 2.0 * math.log(4.0 / 3.0) / (4.0 / 3.0)
    assert abs(dct_constant(2.0, [4.0 / 3.0, 4.0 / 3.0]) - expected) < 1e-12
    assert abs(dct_constant(2.0, [4.0 / 3.0, 4.0 / 3.0], n=2) - 2.0 * expected) < 1e-12
    print("SUCCESS: the DCT constant matches its closed form.")


def test_dct_equality_for_normals() -> None:
    for r in (0.5, 2.0):
        for lam in (0.25, 0.5, 0.75):
            report = dct_gap(densities.normal(2.0), densities.normal(2.0), triple_from_lambda(r, lam), grid_n=GRID_N)
            assert report.passed
            assert abs(report.gap) <= 1e-4, (r, lam, report.gap)
    print("SUCCESS: i.i.d. normals attain the DCT constant.")


def test_dct_holds_for_suite_pairs() -> None:
    pairs = (
        (densities.uniform(0.0, 1.0), densities.uniform(0.0, 1.0)),
        (densities.exponential(1.0), densities.laplace(1.0)),
        (densities.normal(1.0), densities.uniform(0.0, 1.0)),
    )
    for fx, fy in pairs:
        for r in (0.5, 2.0):
            report = dct_gap(fx, fy, triple_from_lambda(r, 0.5), grid_n=GRID_N)
            assert report.passed, (fx, fy, r, report.gap)
    print("SUCCESS: the DCT inequality holds on non-Gaussian pairs.")


def test_dct_m() -> None:
    normals = [densities.normal(1.0)] * 3
    report = dct_gap_m(normals, 2.0, [1.2, 1.2, 1.2], grid_n=GRID_N)
    assert abs(report.gap) <= 1e-4 and report.m == 3
    orders = [Exponent.from_conjugate(4.0), Exponent.from_conjugate(8.0), Exponent.from_conjugate(8.0)]
    mixed = [densities.uniform(0.0, 1.0), densities.exponential(1.0), densities.laplace(1.0)]
    assert dct_gap_m(mixed, 2.0, orders, grid_n=GRID_N).passed
    _expect_error(ERROR_DOMAIN, dct_gap_m, normals, 2.0, [1.2, 1.2])
    _expect_error(ERROR_INCONSISTENT_ORDERS, dct_gap_m, normals[:2], 2.0, [1.2, 1.2])
    print("SUCCESS: the m-variable DCT inequality holds and is tight for normals.")


def test_entropy_power_forms_on_normals() -> None:
    pair = [densities.normal(1.0), densities.normal(1.0)]
    c_form = epi_form_check(pair, 2.0, constant_ram_sason(2.0, 2), 1.0, grid_n=GRID_N)
    assert c_form.kind == KIND_C_FORM and c_form.passed
    assert abs(c_form.details["ratio"] - 1.0 / 0.84375) < 1e-5

    alpha = alpha_li_two_variable(2.0)
    alpha_form = epi_form_check(pair, 2.0, 1.0, alpha, grid_n=GRID_N)
    assert alpha_form.kind == KIND_ALPHA_FORM and alpha_form.passed
    assert abs(alpha_form.details["ratio"] - 2.0 ** (alpha - 1.0)) < 1e-5
    assert abs(alpha_form.details["ratio"] - 1.2524) < 1e-4

    general = epi_form_check(pair, 2.0, constant_general(2.0, 2, 0.5), 0.5, grid_n=GRID_N)
    assert general.kind == KIND_GENERAL_FORM and general.passed

    too_tight = epi_form_check(pair, 2.0, 1.01, 1.0, grid_n=GRID_N)
    assert not too_tight.passed
    print("SUCCESS: entropy power forms pass on normals and c = 1.01 fails.")


def test_entropy_power_forms_on_non_gaussian_pairs() -> None:
    for fx, fy in (
        (densities.uniform(0.0, 1.0), densities.uniform(0.0, 1.0)),
        (densities.exponential(1.0), densities.laplace(1.0)),
    ):
        for r in (1.5, 4.0):
            assert epi_form_check([fx, fy], r, constant_ram_sason(r, 2), 1.0, grid_n=GRID_N).passed
            assert epi_form_check([fx, fy], r, 1.0, alpha_li_two_variable(r), grid_n=GRID_N).passed
        for r in (0.5, 0.8):
            assert epi_form_check([fx, fy], r, constant_logconcave(r, 2), 1.0, grid_n=GRID_N).passed
            assert epi_form_check([fx, fy], r, 1.0, alpha_logconcave_two_variable(r), grid_n=GRID_N).passed
    print("SUCCESS: entropy power forms hold on log-concave non-Gaussian pairs.")


def test_small_orders_need_log_concavity() -> None:
    mixture = densities.normal_mixture([-3.0, 3.0], 1.0, grid_n=GRID_N)
    _expect_error(
        ERROR_PRECONDITION,
        epi_form_check,
        [mixture, densities.normal(1.0)],
        0.5,
        constant_logconcave(0.5, 2),
        1.0,
        grid_n=GRID_N,
    )
    _expect_error(ERROR_DOMAIN, epi_form_check, [densities.normal(1.0)], 2.0, 0.84375, 1.0)
    _expect_error(ERROR_DOMAIN, epi_form_check, [densities.normal(1.0)] * 2, 2.0, -1.0, 1.0)
    print("SUCCESS: r < 1 forms require log-concave parts.")


def test_characterization() -> None:
    assert charact_rhs(1.0, 1.0, WeightVector.uniform(2)) == 0.0
    assert abs(charact_rhs(1.0, 0.5, WeightVector.uniform(2)) - 0.5 * math.log(2.0)) < 1e-15
    _expect_error(ERROR_DOMAIN, charact_rhs, 0.0, 1.0, WeightVector.uniform(2))

    pair = [densities.normal(1.0), densities.normal(1.0)]
    report = characterization_check(pair, 2.0, constant_ram_sason(2.0, 2), 1.0, WeightVector.uniform(2), grid_n=GRID_N)
    assert report.passed
    assert abs(report.lhs) < 1e-8
    assert abs(report.rhs - 0.5 * math.log(0.84375)) < 1e-12
    print("SUCCESS: the characterization right-hand side matches its closed form.")


def test_recipe_weights() -> None:
    weights = recipe_weights([densities.normal(1.0), densities.normal(3.0)], 2.0, 1.0, grid_n=GRID_N)
    assert abs(weights.lambdas[0] - 0.25) < 1e-5
    assert abs(weights.lambdas[1] - 0.75) < 1e-5
    print("SUCCESS: recipe weights are proportional to the entropy powers.")


def test_equivalence_check() -> None:
    c = constant_ram_sason(2.0, 2)
    for parts in (
        [densities.normal(1.0), densities.normal(1.0)],
        [densities.normal(0.01), densities.normal(100.0)],
    ):
        report = equivalence_check(parts, 2.0, c, 1.0, grid_n=GRID_N)
        assert report.details["consistent"] is True
        assert not report_failed(report)
        expected = (report.details["form_relative_gap"] + 1.0) * c
        assert abs(math.exp(2.0 * report.details["characterization_gap"]) * c - expected) < 1e-4

    other = equivalence_check(
        [densities.normal(1.0), densities.normal(3.0)], 2.0, c, 1.0, WeightVector.uniform(2), grid_n=GRID_N
    )
    assert other.details["consistent"] is None
    assert any("consistency not asserted" in warning for warning in other.warnings)
    print("SUCCESS: the characterization at recipe weights agrees with the entropy power form.")


if __name__ == "__main__":
    test_information_inequality_equality_case()
    test_information_inequality_strict_cases()
    test_dct_constant()
    test_dct_equality_for_normals()
    test_dct_holds_for_suite_pairs()
    test_dct_m()
    test_entropy_power_forms_on_normals()
    test_entropy_power_forms_on_non_gaussian_pairs()
    test_small_orders_need_log_concavity()
    test_characterization()
    test_recipe_weights()
    test_equivalence_check()
