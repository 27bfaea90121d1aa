import math

from scipy.integrate import trapezoid

from convolution import SumSpec, scaled_sum_density, sqrt_lambda_spec, sum_spec
import densities
from entropy import SHANNON, normal_entropy_closed_form, renyi_entropy
from errors import ERROR_DOMAIN, ERROR_GRID_COVERAGE, EpiError
from exponents import WeightVector

GRID_N = 16384


def _expect_error(code: str, function, *args, **kwargs) -> None:
    try:
        function(*args, **kwargs)
    except EpiError as exc:
        assert exc.code == code, exc.code
    else:
        raise AssertionError(f"Expected {code} from {function.__name__}{args}")


def test_sum_spec_validation() -> None:
    _expect_error(ERROR_DOMAIN, sum_spec, [densities.normal(1.0)])
    _expect_error(ERROR_DOMAIN, sum_spec, [densities.normal(1.0), densities.normal(1.0)], [1.0, 0.0])
    _expect_error(ERROR_DOMAIN, sum_spec, [densities.normal(1.0), densities.normal(1.0)], [1.0])
    _expect_error(ERROR_DOMAIN, SumSpec, parts=((densities.normal(1.0), 1.0), ("normal", 1.0)))
    _expect_error(
        ERROR_DOMAIN,
        sqrt_lambda_spec,
        [densities.normal(1.0), densities.normal(1.0)],
        WeightVector.uniform(3),
    )
    spec = sqrt_lambda_spec([densities.normal(1.0), densities.uniform(0.0, 1.0)], WeightVector.of([0.25, 0.75]))
    assert spec.coefficients == [0.5, math.sqrt(0.75)]
    print("SUCCESS: sum specs validate their parts and coefficients.")


def test_normal_sums_use_the_closed_form() -> None:
    total = scaled_sum_density(sum_spec([densities.normal(1.0), densities.normal(4.0, 1.0)], [1.0, 0.5]))
    assert total.kind == densities.KIND_NORMAL
    assert total.params["sigma2"] == 2.0
    assert total.params["mean"] == 0.5
    print("SUCCESS: sums of normals return the closed-form normal.")


def test_grid_path_matches_normal_closed_form() -> None:
    spec = sum_spec([densities.normal(1.0), densities.normal(1.0)], tail_order=2.0)
    total = scaled_sum_density(spec, grid_n=GRID_N, allow_closed_form=False)
    assert total.is_grid
    numeric = renyi_entropy(total, 2.0, grid_n=GRID_N).nats
    exact = normal_entropy_closed_form(2.0, 1, 2.0).nats
    assert abs(numeric - exact) < 1e-5, (numeric, exact)
    print("SUCCESS: the FFT convolution path reproduces the normal sum.")


def test_uniform_pair_is_triangular() -> None:
    total = scaled_sum_density(sum_spec([densities.uniform(0.0, 1.0), densities.uniform(0.0, 1.0)]), grid_n=GRID_N)
    assert abs(densities.evaluate(total, 1.0) - 1.0) < 1e-3
    assert abs(densities.evaluate(total, 0.5) - 0.5) < 1e-3
    assert abs(trapezoid(total.fs, total.xs) - 1.0) < 1e-12
    numeric = renyi_entropy(total, 2.0, grid_n=GRID_N).nats
    assert abs(numeric + math.log(2.0 / 3.0)) < 1e-3
    print("SUCCESS: the sum of two uniforms is the triangular density.")


def test_exponential_pair_is_gamma() -> None:
    total = scaled_sum_density(sum_spec([densities.exponential(1.0), densities.exponential(1.0)]), grid_n=GRID_N)
    euler_gamma = 0.5772156649015329
    assert abs(renyi_entropy(total, SHANNON, grid_n=GRID_N).nats - (1.0 + euler_gamma)) < 1e-3
    assert abs(densities.mean(total) - 2.0) < 1e-3
    print("SUCCESS: the sum of two exponentials has the Gamma(2) entropy.")


def test_point_limit() -> None:
    spec = sum_spec([densities.uniform(0.0, 1.0), densities.uniform(0.0, 1.0)])
    _expect_error(ERROR_GRID_COVERAGE, scaled_sum_density, spec, grid_n=GRID_N, max_points=1024)
    print("SUCCESS: sums beyond the point limit raise grid_coverage.")


def test_wide_sums_coarsen_the_lattice() -> None:
    # Uniform(0,1) sets a fine step; the Laplace escort at order 0.3 sets a very wide window
    spec = sum_spec([densities.uniform(0.0, 1.0), densities.laplace(1.0)], tail_order=0.3)
    total = scaled_sum_density(spec, grid_n=GRID_N, max_points=2**21)
    assert len(total.xs) <= 2**21
    assert abs(trapezoid(total.fs, total.xs) - 1.0) < 1e-12
    assert abs(densities.variance(total) - (1.0 / 12.0 + 2.0)) < 1e-3

    narrow = sum_spec([densities.uniform(0.0, 1.0), densities.laplace(1.0)])
    capped = scaled_sum_density(narrow, grid_n=GRID_N, max_points=2**18)
    assert len(capped.xs) <= 2**18
    assert abs(densities.variance(capped) - (1.0 / 12.0 + 2.0)) < 1e-3
    print("SUCCESS: sums over wide windows coarsen the lattice instead of failing.")


def test_variance_additivity() -> None:
    parts = [densities.exponential(1.0), densities.laplace(1.0), densities.uniform(0.0, 1.0)]
    coefficients = [1.0, 2.0, -0.5]
    total = scaled_sum_density(sum_spec(parts, coefficients), grid_n=GRID_N)
    expected = 1.0 + 4.0 * 2.0 + 0.25 / 12.0
    assert abs(densities.variance(total) - expected) / expected < 1e-4
    assert abs(densities.mean(total) - (1.0 - 0.25)) < 1e-4
    print("SUCCESS: variances add with squared coefficients.")


def test_part_order_does_not_matter() -> None:
    uniform, laplace = densities.uniform(0.0, 1.0), densities.laplace(1.0)
    forward = scaled_sum_density(sum_spec([uniform, laplace]), grid_n=GRID_N)
    backward = scaled_sum_density(sum_spec([laplace, uniform]), grid_n=GRID_N)
    assert len(forward.xs) == len(backward.xs)
    assert abs(forward.xs[0] - backward.xs[0]) < 1e-12
    assert float(abs(forward.fs - backward.fs).max()) < 1e-10
    print("SUCCESS: sums are symmetric in the order of their parts.")


def test_log_concave_parts_sum_to_log_concave() -> None:
    grid_n = 4096
    pairs = [
        (densities.uniform(0.0, 1.0), densities.uniform(0.0, 1.0)),
        (densities.exponential(1.0), densities.laplace(1.0)),
        (densities.uniform(0.0, 1.0), densities.exponential(2.0)),
    ]
    for first, second in pairs:
        total = scaled_sum_density(sum_spec([first, second]), grid_n=grid_n)
        assert densities.is_log_concave(total), (first, second)
    print("SUCCESS: sums of log-concave parts stay log-concave.")


if __name__ == "__main__":
    test_sum_spec_validation()
    test_normal_sums_use_the_closed_form()
    test_grid_path_matches_normal_closed_form()
    test_uniform_pair_is_triangular()
    test_exponential_pair_is_gamma()
    test_point_limit()
    test_wide_sums_coarsen_the_lattice()
    test_variance_additivity()
    test_part_order_does_not_matter()
    test_log_concave_parts_sum_to_log_concave()
