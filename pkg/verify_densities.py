import math

import numpy as np

import densities
from density_specs import density_label, density_to_spec, parse_density_argument
from epi_verify import epi_form_check
from errors import ERROR_DOMAIN, ERROR_PRECONDITION, ERROR_USAGE, EpiError
from exponents import constant_logconcave


def _expect_error(code: str, function, *args, **kwargs) -> EpiError:
    try:
        function(*args, **kwargs)
    except EpiError as exc:
        assert exc.code == code, exc.code
        return exc
    raise AssertionError(f"Expected {code} from {function.__name__}{args}")


def test_constructors_validate_parameters() -> None:
    _expect_error(ERROR_DOMAIN, densities.normal, -1.0)
    _expect_error(ERROR_DOMAIN, densities.uniform, 1.0, 0.0)
    _expect_error(ERROR_DOMAIN, densities.exponential, 0.0)
    _expect_error(ERROR_DOMAIN, densities.laplace, math.inf)
    _expect_error(ERROR_DOMAIN, densities.grid, [0.0, 1.0, 3.0], [1.0, 1.0, 1.0])
    _expect_error(ERROR_DOMAIN, densities.grid, [0.0, 1.0, 2.0], [1.0, -1.0, 1.0])
    _expect_error(ERROR_DOMAIN, densities.grid, [0.0, 1.0], [1.0, 1.0])
    print("SUCCESS: density constructors reject invalid parameters.")


def test_grid_is_normalized() -> None:
    d = densities.grid([0.0, 1.0, 2.0], [1.0, 1.0, 1.0])
    assert np.allclose(d.fs, [0.5, 0.5, 0.5])
    assert abs(densities.cdf(d, 2.0) - 1.0) < 1e-12
    assert abs(densities.cdf(d, 1.0) - 0.5) < 1e-12
    assert densities.evaluate(d, 5.0) == 0.0
    print("SUCCESS: grid densities are normalised with the trapezoid rule.")


def test_pointwise_values() -> None:
    assert abs(densities.evaluate(densities.normal(1.0), 0.0) - 1.0 / math.sqrt(2.0 * math.pi)) < 1e-15
    assert abs(densities.quantile(densities.exponential(1.0), 0.5) - math.log(2.0)) < 1e-12
    assert abs(densities.upper_quantile(densities.exponential(1.0), 0.1) - math.log(10.0)) < 1e-12
    assert abs(densities.variance(densities.laplace(2.0)) - 8.0) < 1e-12
    _expect_error(ERROR_DOMAIN, densities.quantile, densities.normal(1.0), 1.0)
    print("SUCCESS: pdf, quantiles and moments match closed forms.")


def test_escort_families() -> None:
    assert densities.escort(densities.normal(4.0), 2.0).params["sigma2"] == 2.0
    assert densities.escort(densities.exponential(1.0), 3.0).params["rate"] == 3.0
    assert densities.escort(densities.laplace(2.0), 2.0).params["scale"] == 1.0
    uniform = densities.uniform(0.0, 1.0)
    assert densities.escort(uniform, 5.0) is uniform
    assert densities.escort(densities.normal(1.0), 1.0).params["sigma2"] == 1.0

    tilted = densities.escort(densities.grid([0.0, 1.0, 2.0], [1.0, 2.0, 1.0]), 2.0)
    assert tilted.is_grid
    assert np.isclose(tilted.fs[1] / tilted.fs[0], 4.0)
    print("SUCCESS: escort densities stay in their family.")


def test_scaling() -> None:
    flipped = densities.scale(densities.uniform(0.0, 1.0), -2.0)
    assert flipped.params["a"] == -2.0 and flipped.params["b"] == 0.0
    assert densities.scale(densities.normal(1.0), 3.0).params["sigma2"] == 9.0
    mirrored = densities.scale(densities.exponential(1.0), -1.0, grid_n=16384)
    assert mirrored.is_grid
    assert abs(densities.mean(mirrored) + 1.0) < 1e-3
    _expect_error(ERROR_DOMAIN, densities.scale, densities.normal(1.0), 0.0)
    print("SUCCESS: scaling keeps families closed where possible and tabulates otherwise.")


def test_escorts_compose() -> None:
    tabulated = densities.normal_mixture([-2.0, 1.0], 1.0, [0.3, 0.7], grid_n=4096)
    for d in (densities.normal(2.0), densities.exponential(1.5), densities.laplace(0.5), tabulated):
        twice = densities.escort(densities.escort(d, 2.0), 0.75)
        once = densities.escort(d, 1.5)
        assert twice.kind == once.kind
        if d.is_grid:
            assert np.allclose(twice.fs, once.fs, rtol=1e-10, atol=0.0)
        else:
            assert all(math.isclose(twice.params[key], once.params[key], rel_tol=1e-14) for key in once.params)
    print("SUCCESS: escort of order q of the escort of order p is the escort of order pq.")


def test_scaling_round_trip() -> None:
    tabulated = densities.normal_mixture([-2.0, 1.0], 1.0, [0.3, 0.7], grid_n=4096)
    for a in (2.5, -0.4):
        back = densities.scale(densities.scale(tabulated, a), 1.0 / a)
        assert len(back.xs) == len(tabulated.xs)
        assert float(np.max(np.abs(back.xs - tabulated.xs))) < 1e-10
        assert float(np.max(np.abs(back.fs - tabulated.fs))) < 1e-10
    assert densities.scale(densities.uniform(0.0, 1.0), 3.0).params["b"] == 3.0
    print("SUCCESS: scaling by a and then 1/a returns the original grid.")


def test_quantile_inverts_cdf() -> None:
    tabulated = densities.grid(np.linspace(0.0, 4.0, 9), [1.0, 2.0, 3.0, 4.0, 5.0, 4.0, 3.0, 2.0, 1.0])
    cases = [
        (densities.normal(2.0, 1.0), np.linspace(-4.0, 6.0, 21)),
        (densities.laplace(1.0), np.linspace(-8.0, 8.0, 33)),
        (densities.exponential(2.0), np.linspace(0.05, 6.0, 20)),
        (densities.uniform(-1.0, 3.0), np.linspace(-0.9, 2.9, 20)),
        (tabulated, np.linspace(0.1, 3.9, 20)),
    ]
    for d, xs in cases:
        back = densities.quantile(d, densities.cdf(d, xs))
        assert float(np.max(np.abs(back - xs))) < 1e-9, d
    print("SUCCESS: quantile(cdf(x)) returns x.")


def test_power_integrals() -> None:
    value, _ = densities.power_integral(densities.uniform(0.0, 2.0), 2.0, grid_n=16384)
    assert abs(value - 0.5) < 1e-12
    value, _ = densities.power_integral(densities.normal(1.0), 2.0, grid_n=16384)
    assert abs(value - 1.0 / (2.0 * math.sqrt(math.pi))) < 1e-10
    value, _ = densities.power_integral(densities.exponential(1.0), 0.5, grid_n=16384)
    assert abs(value - 2.0) < 1e-8
    print("SUCCESS: power integrals match closed forms.")


def test_power_expectation() -> None:
    f = densities.normal(1.0)
    value = densities.power_expectation(f, f, 1.0, 1.0, grid_n=16384)
    assert abs(value - 1.0 / (2.0 * math.sqrt(math.pi))) < 1e-10
    print("SUCCESS: power expectations integrate f * phi^s.")


def test_windows() -> None:
    assert densities.window(densities.uniform(0.0, 1.0)) == (0.0, 1.0)
    lower, upper = densities.window(densities.exponential(1.0), 0.5)
    assert lower == 0.0 and upper > 40.0
    narrow = densities.window(densities.normal(1.0), 2.0)
    wide = densities.window(densities.normal(1.0), 0.5)
    assert wide[1] > narrow[1]
    print("SUCCESS: windows cover the density and its escort.")


def test_log_concavity_detection() -> None:
    assert densities.is_log_concave(densities.laplace(1.0))
    assert densities.is_log_concave(densities.normal_mixture([0.0], 1.0, grid_n=4096))
    assert not densities.is_log_concave(densities.normal_mixture([-3.0, 3.0], 1.0, grid_n=4096))
    print("SUCCESS: log-concavity is detected on tabulated densities.")


def test_log_concavity_sees_tail_bumps() -> None:
    # valley between the components sits near 1e-5 of the peak
    near = densities.normal_mixture([0.0, 6.0], 1.0, [1 - 1e-5, 1e-5], grid_n=16384)
    assert not densities.is_log_concave(near)
    far = densities.normal_mixture([0.0, 10.0], 1.0, [1 - 1e-5, 1e-5], grid_n=16384)
    assert not densities.is_log_concave(far)

    _expect_error(ERROR_PRECONDITION, epi_form_check, [far, densities.normal(1.0)], 0.5, constant_logconcave(0.5, 2), 1.0)
    print("SUCCESS: small tail bumps break log-concavity and block the r < 1 constants.")


def test_density_specs() -> None:
    uniform = parse_density_argument('{"kind": "uniform", "a": 0, "b": 2}')
    assert uniform.params["b"] == 2.0
    assert density_to_spec(densities.normal(2.0)) == {"kind": "normal", "sigma2": 2.0, "mean": 0.0}
    assert density_label(densities.laplace(1.0)) == "laplace(scale=1,loc=0)"

    tabulated = parse_density_argument('{"kind": "grid", "xs_min": 0, "xs_max": 2, "n": 3, "fs": [1, 1, 1]}')
    assert tabulated.is_grid and len(tabulated.xs) == 3

    mixture = parse_density_argument('{"kind": "mixture", "means": [-3, 3], "sigma2": 1}', grid_n=4096)
    assert mixture.is_grid and not densities.is_log_concave(mixture)

    error = _expect_error(ERROR_USAGE, parse_density_argument, "{not json")
    assert "not valid JSON" in error.message
    error = _expect_error(ERROR_USAGE, parse_density_argument, '{"kind": "uniform", "a": 2, "b": 1}')
    assert "b must be greater than a" in error.message
    _expect_error(ERROR_USAGE, parse_density_argument, '{"kind": "grid", "xs_min": 0, "xs_max": 1, "n": 4, "fs": [1, 1, 1]}')
    _expect_error(ERROR_USAGE, parse_density_argument, '{"kind": "cauchy"}')
    print("SUCCESS: JSON density specs parse and report invalid input as usage errors.")


if __name__ == "__main__":
    test_constructors_validate_parameters()
    test_grid_is_normalized()
    test_pointwise_values()
    test_escort_families()
    test_scaling()
    test_escorts_compose()
    test_scaling_round_trip()
    test_quantile_inverts_cdf()
    test_power_integrals()
    test_power_expectation()
    test_windows()
    test_log_concavity_detection()
    test_log_concavity_sees_tail_bumps()
    test_density_specs()
