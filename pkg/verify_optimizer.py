from itertools import permutations
import math

import numpy as np

from errors import ERROR_DOMAIN, EpiError
from exponents import alpha_li_two_variable, constant_general, constant_ram_sason, uniform_ratio
import optimizer


def _expect_error(code: str, function, *args, **kwargs) -> None:
    try:
        function(*args, **kwargs)
    except EpiError as exc:
        assert exc.code == code, exc.code
    else:
        raise AssertionError(f"Expected {code} from {function.__name__}{args}")


def test_simplex_lattice() -> None:
    rows = optimizer.simplex_lattice(2, 4)
    assert rows.tolist() == [[0, 4], [1, 3], [2, 2], [3, 1], [4, 0]]
    assert optimizer.simplex_lattice(3).shape == (20301, 3)
    assert np.all(optimizer.simplex_lattice(3).sum(axis=1) == optimizer.LATTICE_DIVISIONS)
    print("SUCCESS: the simplex lattice enumerates compositions in lexicographic order.")


def test_minimize_a_reproduces_ram_sason() -> None:
    result = optimizer.minimize_A(2.0, 2)
    assert abs(result.value - math.log(0.84375)) < 1e-10
    assert result.argmin.lambdas == (0.5, 0.5)
    assert result.method == optimizer.METHOD_GRID_SCAN
    assert result.resolution == 1.0 / optimizer.LATTICE_DIVISIONS
    print("SUCCESS: min A at r=2, m=2 is log 0.84375 at the uniform weight.")


def test_minimize_a_grid() -> None:
    for r in (1.5, 2.0, 4.0):
        for m in (2, 3):
            result = optimizer.minimize_A(r, m)
            assert abs(result.value - math.log(constant_ram_sason(r, m))) < 1e-6, (r, m, result.value)
            assert optimizer.sanity_check(result).passed
    third = optimizer.minimize_A(2.0, 3)
    assert third.method == optimizer.METHOD_LOCAL_REFINE
    assert max(abs(lam - 1.0 / 3.0) for lam in third.argmin.lambdas) < 1e-4
    print("SUCCESS: min A matches log c for every (r, m) on the grid.")


def test_minimize_ratio() -> None:
    for r in (1.5, 2.0, 4.0):
        pair = optimizer.minimize_A_over_H(r, 2)
        assert abs(pair.value - (1.0 / alpha_li_two_variable(r) - 1.0)) < 2e-3, (r, pair.value)
        assert min(pair.argmin.lambdas) > 0.0
        triple = optimizer.minimize_A_over_H(r, 3)
        assert min(triple.argmin.lambdas) == 0.0
        assert abs(triple.value - pair.value) < 1e-8
    print("SUCCESS: min A/H matches 1/alpha - 1 and sits on the boundary for m = 3.")


def test_ratio_minimum_is_the_half_half_edge() -> None:
    assert abs(optimizer.minimize_A_over_H(2.0, 3).value - (-0.24511)) < 1e-5
    for r in (0.5, 1.5, 2.0, 4.0):
        pair = optimizer.minimize_A_over_H(r, 2)
        for m in (3, 4):
            result = optimizer.minimize_A_over_H(r, m)
            expected = (0.0,) * (m - 2) + (0.5, 0.5)
            assert max(abs(a - b) for a, b in zip(result.argmin.lambdas, expected)) < 1e-9, (r, m, result.argmin)
            assert abs(result.value - pair.value) < 1e-8, (r, m)
            assert uniform_ratio(r, m) > result.value + 1e-6, (r, m)
    print("SUCCESS: for m >= 3 min A/H sits at two halves on an edge and equals the m = 2 value.")


def test_objectives_are_permutation_symmetric() -> None:
    rng = np.random.default_rng(11)
    points = rng.dirichlet(np.ones(3), size=64)
    for result in (
        optimizer.minimize_A(2.0, 3),
        optimizer.minimize_A_over_H(2.0, 3),
        optimizer.minimize_mixed(2.0, 3, 0.5),
    ):
        objective = optimizer.objective_for(result)
        base = objective(points)
        argmin = result.argmin.as_array()
        for order in permutations(range(3)):
            order = list(order)
            assert np.allclose(objective(points[:, order]), base, rtol=1e-12, atol=1e-14), (result.objective, order)
            assert abs(float(objective(argmin[order][None, :])[0]) - result.value) < 1e-12
    print("SUCCESS: simplex objectives do not depend on the order of the weights.")


def test_minimize_mixed() -> None:
    result = optimizer.minimize_mixed(2.0, 2, 0.5)
    assert abs(result.value - math.log(constant_general(2.0, 2, 0.5))) < 1e-6
    assert result.alpha == 0.5
    assert optimizer.sanity_check(result).passed
    print("SUCCESS: the mixed objective reproduces the general constant.")


def test_invalid_searches() -> None:
    _expect_error(ERROR_DOMAIN, optimizer.minimize_mixed, 2.0, 2, 0.0)
    _expect_error(ERROR_DOMAIN, optimizer.minimize_mixed, 2.0, 2, 1.5)
    _expect_error(ERROR_DOMAIN, optimizer.minimize_A, 2.0, 5)
    _expect_error(ERROR_DOMAIN, optimizer.minimize_A_over_H, 2.0, 1)
    print("SUCCESS: invalid alpha and m are rejected.")


def test_reports() -> None:
    result = optimizer.minimize_A(2.0, 2)
    seeded = optimizer.sanity_check(result, samples=200, seed=7)
    assert seeded.passed
    assert seeded.details["seed"] == 7 and seeded.details["samples"] == 200
    assert optimizer.random_minimum(result, seed=7) == optimizer.random_minimum(result, seed=7)

    accuracy = optimizer.closed_form_check(result, math.log(0.84375), 1e-6, label="log c")
    assert accuracy.passed and accuracy.details["method"] == optimizer.METHOD_GRID_SCAN
    wrong = optimizer.closed_form_check(result, 0.0, 1e-6, label="log c")
    assert not wrong.passed
    print("SUCCESS: optimizer reports are seeded and flag wrong references.")


if __name__ == "__main__":
    test_simplex_lattice()
    test_minimize_a_reproduces_ram_sason()
    test_minimize_a_grid()
    test_minimize_ratio()
    test_ratio_minimum_is_the_half_half_edge()
    test_objectives_are_permutation_symmetric()
    test_minimize_mixed()
    test_invalid_searches()
    test_reports()
