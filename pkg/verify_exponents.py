import math

from errors import (
    ERROR_DOMAIN,
    ERROR_INCOMPATIBLE_EXPONENTS,
    ERROR_INCONSISTENT_ORDERS,
    ERROR_UNSUPPORTED_INFINITE_ORDER,
    EpiError,
)
from exponents import (
    CONSTANT_GENERAL,
    CONSTANT_LI_ALPHA,
    CONSTANT_LOGCONCAVE,
    CONSTANT_RAM_SASON,
    Exponent,
    WeightVector,
    alpha_bobkov_marsiglietti,
    alpha_li,
    alpha_li_two_variable,
    alpha_logconcave,
    alpha_logconcave_two_variable,
    big_A,
    conjugate,
    constant_bobkov_chistyakov,
    constant_general,
    constant_logconcave,
    constant_logconcave_general,
    constant_ram_sason,
    constant_rows,
    discrete_entropy,
    epi_constant,
    logconcave_constants,
    make_triple,
    triple_from_lambda,
    uniform_ratio,
    weights_from_orders,
)


def _expect_error(code: str, function, *args) -> None:
    try:
        function(*args)
    except EpiError as exc:
        assert exc.code == code, exc.code
    else:
        raise AssertionError(f"Expected {code} from {function.__name__}{args}")


def test_conjugates() -> None:
    assert conjugate(2.0) == 2.0
    assert conjugate(0.5) == -1.0
    assert Exponent.from_conjugate(4.0).p == 4.0 / 3.0
    _expect_error(ERROR_DOMAIN, conjugate, 1.0)
    _expect_error(ERROR_DOMAIN, conjugate, -2.0)
    _expect_error(ERROR_UNSUPPORTED_INFINITE_ORDER, Exponent.from_conjugate, 1.0)
    print("SUCCESS: conjugate exponents and their error cases behave correctly.")


def test_triples() -> None:
    triple = make_triple(4.0 / 3.0, 4.0 / 3.0)
    assert abs(triple.r.p - 2.0) < 1e-12
    assert abs(triple.lam - 0.5) < 1e-12

    triple = triple_from_lambda(2.0, 0.25)
    assert abs(1.0 / triple.p.p_prime + 1.0 / triple.q.p_prime - 1.0 / triple.r.p_prime) < 1e-12
    assert abs(triple.p.p - 8.0 / 7.0) < 1e-12
    assert abs(triple.q.p - 1.6) < 1e-12

    small = triple_from_lambda(0.5, 0.5)
    assert small.p.p < 1.0 and small.q.p < 1.0

    _expect_error(ERROR_UNSUPPORTED_INFINITE_ORDER, make_triple, 2.0, 2.0)
    _expect_error(ERROR_INCOMPATIBLE_EXPONENTS, make_triple, 2.0, 0.5)
    _expect_error(ERROR_INCOMPATIBLE_EXPONENTS, make_triple, 3.0, 3.0)
    _expect_error(ERROR_DOMAIN, triple_from_lambda, 2.0, 1.0)
    print("SUCCESS: exponent triples satisfy 1/p' + 1/q' = 1/r'.")


def test_weights_from_orders() -> None:
    weights = weights_from_orders(2.0, [1.2, 1.2, 1.2])
    assert all(abs(value - 1.0 / 3.0) < 1e-12 for value in weights.lambdas)

    mixed = weights_from_orders(2.0, [Exponent.from_conjugate(4.0), Exponent.from_conjugate(8.0), Exponent.from_conjugate(8.0)])
    assert [round(value, 12) for value in mixed.lambdas] == [0.5, 0.25, 0.25]

    _expect_error(ERROR_INCONSISTENT_ORDERS, weights_from_orders, 2.0, [1.2, 1.2])
    _expect_error(ERROR_INCOMPATIBLE_EXPONENTS, weights_from_orders, 2.0, [1.2, 0.5])
    print("SUCCESS: weights derived from orders sum to one and reject inconsistent orders.")


def test_weight_vector_validation() -> None:
    assert WeightVector.of([1.0, 0.0]).boundary is True
    assert WeightVector.uniform(3).boundary is False
    try:
        WeightVector.of([0.5, 0.6])
    except EpiError as exc:
        assert "sum to 1" in exc.message
    else:
        raise AssertionError("Expected weights that do not sum to one to be rejected")
    print("SUCCESS: weight vectors validate the simplex.")


def test_closed_form_spot_values() -> None:
    assert abs(constant_ram_sason(2.0, 2) - 0.84375) < 1e-15
    assert abs(constant_bobkov_chistyakov(2.0) - 2.0 / math.e) < 1e-12
    assert abs(alpha_li_two_variable(2.0) - 1.32470) < 1e-5
    assert alpha_bobkov_marsiglietti(2.0) == 1.5
    for r in (1.2, 2.0, 5.0, 10.0):
        assert abs(alpha_li(r) - alpha_li_two_variable(r)) < 1e-12, r
    print("SUCCESS: large-order constants match their closed-form spot values.")


def test_ram_sason_decreases_to_bobkov_chistyakov() -> None:
    for r in (1.1, 1.5, 2.0, 4.0, 10.0):
        limit = constant_bobkov_chistyakov(r)
        values = [constant_ram_sason(r, m) for m in range(2, 65)]
        assert all(later < earlier for earlier, later in zip(values, values[1:])), r
        assert all(limit < value for value in values), r
        assert constant_ram_sason(r, 10_000) - limit < 1e-3
    print("SUCCESS: the Ram-Sason constant decreases in m toward the Bobkov-Chistyakov constant.")


def test_logconcave_constants() -> None:
    assert abs(constant_logconcave(0.5, 2) - 0.84375) < 1e-15
    assert abs(alpha_logconcave_two_variable(0.3) - 1.6943) < 1e-3
    assert abs(alpha_logconcave_two_variable(0.8) - 1.087) < 1e-3
    assert abs(alpha_logconcave_two_variable(0.5) - 1.32470) < 1e-5
    for r in (0.3, 0.5, 0.8):
        assert abs(alpha_logconcave(r) - alpha_logconcave_two_variable(r)) < 1e-12, r
    assert logconcave_constants(0.5, 2).kind == CONSTANT_LOGCONCAVE
    _expect_error(ERROR_DOMAIN, constant_logconcave, 2.0, 2)
    _expect_error(ERROR_DOMAIN, constant_ram_sason, 0.5, 2)
    print("SUCCESS: log-concave constants match their closed-form spot values.")


def test_general_constants() -> None:
    for r in (1.5, 2.0, 4.0):
        assert abs(constant_general(r, 2, 1.0) - constant_ram_sason(r, 2)) < 1e-15
    assert abs(constant_general(2.0, 2, 0.5) - math.sqrt(2.0 * 0.84375) / 2.0) < 1e-15
    assert abs(constant_logconcave_general(0.5, 2, 0.5) - math.sqrt(2.0 * 0.84375) / 2.0) < 1e-15
    _expect_error(ERROR_DOMAIN, constant_general, 2.0, 2, 0.0)
    _expect_error(ERROR_DOMAIN, constant_general, 2.0, 2, 1.5)
    print("SUCCESS: general constants interpolate between the c and alpha forms.")


def test_epi_constant_dispatch() -> None:
    assert epi_constant(CONSTANT_RAM_SASON, 2.0, 2).value == 0.84375
    assert abs(epi_constant(CONSTANT_LI_ALPHA, 2.0, 3).value - alpha_li(2.0)) < 1e-15
    general = epi_constant(CONSTANT_GENERAL, 2.0, 2, 0.5)
    assert general.alpha_input == 0.5
    _expect_error(ERROR_DOMAIN, epi_constant, "Unknown", 2.0, 2)
    _expect_error(ERROR_DOMAIN, epi_constant, CONSTANT_GENERAL, 2.0, 2)
    _expect_error(ERROR_DOMAIN, epi_constant, CONSTANT_RAM_SASON, 2.0, 1)
    print("SUCCESS: epi_constant dispatches every kind and validates its inputs.")


def test_constant_rows() -> None:
    rows = constant_rows([2.0, 0.5], [2])
    by_kind = {(row["r"], row["kind"]): row["value"] for row in rows}
    assert by_kind[(2.0, CONSTANT_RAM_SASON)] == 0.84375
    assert abs(by_kind[(2.0, CONSTANT_LI_ALPHA)] - 1.32470) < 1e-5
    assert by_kind[(0.5, CONSTANT_LOGCONCAVE)] == 0.84375
    assert all(row["m"] == 2 for row in rows)
    assert len(rows) == 5 + 3
    print("SUCCESS: constant rows list every constant defined at each order.")


def test_simplex_functions() -> None:
    assert abs(discrete_entropy(WeightVector.uniform(3)) - math.log(3.0)) < 1e-12
    assert discrete_entropy(WeightVector.of([1.0, 0.0])) == 0.0
    assert abs(big_A(2.0, WeightVector.uniform(2)) - math.log(0.84375)) < 1e-12
    assert abs(big_A(0.5, WeightVector.uniform(2)) - math.log(0.84375)) < 1e-12
    assert abs(big_A(2.0, WeightVector.of([1.0, 0.0]))) < 1e-15
    ratios = [uniform_ratio(2.0, m) for m in (2, 3, 4, 8)]
    assert all(value < 0 for value in ratios)
    assert ratios == sorted(ratios)
    assert abs(ratios[0] - (1.0 / alpha_li_two_variable(2.0) - 1.0)) < 1e-9
    print("SUCCESS: A and H behave as expected on the simplex.")


if __name__ == "__main__":
    test_conjugates()
    test_triples()
    test_weights_from_orders()
    test_weight_vector_validation()
    test_closed_form_spot_values()
    test_ram_sason_decreases_to_bobkov_chistyakov()
    test_logconcave_constants()
    test_general_constants()
    test_epi_constant_dispatch()
    test_constant_rows()
    test_simplex_functions()
