import math

import densities
import entropy
from errors import ERROR_DOMAIN, ERROR_PRECONDITION, EpiError

GRID_N = 16384


def _expect_error(code: str, function, *args, **kwargs) -> None:
    try:
        function(*args, **kwargs)
    except EpiError as exc:
        assert exc.code == code, exc.code
    else:
        raise AssertionError(f"Expected {code} from {function.__name__}{args}")


def test_gaussian_entropy_oracle() -> None:
    for sigma2 in (0.25, 1.0, 4.0):
        for p in (0.5, 2.0, 3.0, 10.0, 1.0 - 1e-5, 1.0 + 1e-5):
            numeric = entropy.renyi_entropy(densities.normal(sigma2), p, grid_n=GRID_N)
            exact = entropy.normal_entropy_closed_form(sigma2, 1, p)
            assert abs(numeric.nats - exact.nats) < 1e-6, (sigma2, p, numeric.nats, exact.nats)
            assert numeric.warnings == ()
    print("SUCCESS: quadrature matches the Gaussian closed form within 1e-6 nats.")


def test_shannon_entropy() -> None:
    value = entropy.renyi_entropy(densities.normal(1.0), entropy.SHANNON, grid_n=GRID_N)
    assert value.is_shannon
    assert abs(value.nats - 0.5 * math.log(2.0 * math.pi * math.e)) < 1e-9
    assert entropy.renyi_entropy(densities.normal(1.0), 1.0, grid_n=GRID_N).is_shannon
    exponential = entropy.renyi_entropy(densities.exponential(2.0), entropy.SHANNON, grid_n=GRID_N)
    assert abs(exponential.nats - (1.0 - math.log(2.0))) < 1e-8
    print("SUCCESS: the Shannon limit matches its closed forms.")


def test_uniform_flatness() -> None:
    d = densities.uniform(0.0, 2.0)
    for p in (0.1 * 1.25**k for k in range(1, 21)):
        if abs(p - 1.0) < 1e-3:
            continue
        assert abs(entropy.renyi_entropy(d, p, grid_n=GRID_N).nats - math.log(2.0)) < 1e-8, p
    print("SUCCESS: the uniform entropy is log 2 at every order.")


def test_invalid_orders() -> None:
    _expect_error(ERROR_DOMAIN, entropy.renyi_entropy, densities.normal(1.0), 0.0)
    _expect_error(ERROR_DOMAIN, entropy.renyi_entropy, densities.normal(1.0), "tsallis")
    _expect_error(ERROR_DOMAIN, entropy.renyi_entropy, [], 2.0)
    print("SUCCESS: invalid orders are rejected.")


def test_product_densities() -> None:
    pair = entropy.renyi_entropy([densities.normal(1.0), densities.normal(1.0)], 2.0, grid_n=GRID_N)
    exact = entropy.normal_entropy_closed_form(1.0, 2, 2.0)
    assert pair.dimension == 2
    assert abs(pair.nats - exact.nats) < 1e-6
    power = entropy.entropy_power([densities.normal(1.0), densities.normal(1.0)], 2.0, grid_n=GRID_N)
    assert abs(power / (4.0 * math.pi) - 1.0) < 1e-6
    print("SUCCESS: product densities add entropies and share one entropy power.")


def test_entropy_powers() -> None:
    assert abs(entropy.normal_entropy_power(1.0, 2.0) - 4.0 * math.pi) < 1e-12
    assert abs(entropy.normal_entropy_power(1.0, entropy.SHANNON) - 2.0 * math.pi * math.e) < 1e-12
    numeric = entropy.entropy_power(densities.normal(3.0), 2.0, grid_n=GRID_N)
    assert abs(numeric / entropy.normal_entropy_power(3.0, 2.0) - 1.0) < 1e-6
    assert abs(entropy.equivalent_normal_variance(densities.normal(3.0), 2.0, grid_n=GRID_N) - 3.0) < 1e-5
    print("SUCCESS: entropy powers reproduce the normal variance.")


def test_scaling_shifts_entropy() -> None:
    for d, a in ((densities.laplace(1.0), 3.0), (densities.normal(2.0), -0.5), (densities.exponential(1.0), 2.0)):
        scaled = densities.scale(d, a)
        for p in (0.5, entropy.SHANNON, 2.0, 3.0):
            shift = entropy.renyi_entropy(scaled, p, grid_n=GRID_N).nats - entropy.renyi_entropy(d, p, grid_n=GRID_N).nats
            assert abs(shift - math.log(abs(a))) < 1e-6, (d, a, p, shift)
            ratio = entropy.entropy_power(scaled, p, grid_n=GRID_N) / entropy.entropy_power(d, p, grid_n=GRID_N)
            assert abs(ratio / (a * a) - 1.0) < 3e-6, (d, a, p, ratio)
    print("SUCCESS: scaling by a shifts h_p by log|a| and multiplies N_p by a^2.")


def test_kl_divergence() -> None:
    expected = 0.5 * (1.0 / 2.0 - 1.0 + math.log(2.0))
    value = entropy.kl_divergence(densities.normal(0.5), densities.normal(1.0), grid_n=GRID_N)
    assert abs(value - expected) < 1e-8
    assert abs(expected - 0.09657) < 1e-5
    assert entropy.kl_divergence(densities.normal(1.0), densities.uniform(0.0, 1.0), grid_n=GRID_N) == math.inf
    assert entropy.kl_divergence(densities.uniform(0.0, 1.0), densities.normal(1.0), grid_n=GRID_N) < math.inf
    print("SUCCESS: KL divergence matches the Gaussian closed form and flags support mismatch.")


def test_derivative_identity() -> None:
    for d in (densities.normal(1.0), densities.exponential(1.0), densities.laplace(1.0)):
        for p in (0.5, 2.0, 3.0):
            report = entropy.derivative_identity_check(d, p, grid_n=GRID_N)
            assert report.passed, (d, p, report.rhs)
            assert report.rhs < 1e-4
    _expect_error(ERROR_DOMAIN, entropy.derivative_identity_gap, densities.normal(1.0), 1.0)
    print("SUCCESS: the finite-difference derivative matches -D(f_p||f)/(1-p)^2.")


def test_monotonicity() -> None:
    for d in (densities.normal(1.0), densities.exponential(1.0), densities.laplace(1.0)):
        report = entropy.monotonicity_check(d, 0.5, 2.0, grid_n=GRID_N)
        assert report.passed and report.gap > 0
    flat = entropy.monotonicity_check(densities.uniform(0.0, 1.0), 0.5, 2.0, grid_n=GRID_N)
    assert flat.passed and abs(flat.gap) < 1e-8
    mixture = densities.normal_mixture([-3.0, 3.0], 1.0, [0.2, 0.8], grid_n=GRID_N)
    for low, high in ((0.3, 0.8), (0.8, 1.5), (2.0, 5.0)):
        strict = entropy.monotonicity_check(mixture, low, high, grid_n=GRID_N)
        assert strict.passed and strict.gap > 1e-3, (low, high, strict.gap)
    _expect_error(ERROR_DOMAIN, entropy.monotonicity_check, densities.normal(1.0), 2.0, 0.5)
    print("SUCCESS: Renyi entropy is nonincreasing in the order.")


def test_varentropy() -> None:
    for p in (0.5, 1.0, 2.0, 4.0):
        normal = entropy.varentropy(densities.normal(1.0), p, grid_n=GRID_N)
        assert abs(normal.value - 1.0 / (2.0 * p * p)) < 1e-6, (p, normal.value)
        assert normal.within_bound and normal.bound_asserted
        for d in (densities.exponential(1.0), densities.laplace(1.0)):
            result = entropy.varentropy(d, p, grid_n=GRID_N)
            assert abs(result.value - 1.0 / (p * p)) < 1e-6, (d, p, result.value)
            assert entropy.varentropy_check(d, p, grid_n=GRID_N).passed
        assert entropy.varentropy(densities.uniform(0.0, 1.0), p, grid_n=GRID_N).value < 1e-12
    print("SUCCESS: varentropy stays within n/p^2 and meets it for exponential and Laplace.")


def test_varentropy_warns_without_log_concavity() -> None:
    mixture = densities.normal_mixture([-3.0, 3.0], 1.0, grid_n=GRID_N)
    result = entropy.varentropy(mixture, 2.0, grid_n=GRID_N)
    assert not result.bound_asserted
    assert "bound not asserted: density is not log-concave" in result.warnings
    print("SUCCESS: varentropy reports an unasserted bound for non-log-concave input.")


def test_concavity_scan() -> None:
    orders = [round(0.3 + 0.1 * k, 10) for k in range(28)]
    for d in (densities.normal(1.0), densities.exponential(1.0), densities.laplace(1.0), densities.uniform(0.0, 1.0)):
        assert entropy.concavity_scan(d, orders, grid_n=GRID_N), d
        assert entropy.concavity_check(d, orders, grid_n=GRID_N).passed
    mixture = densities.normal_mixture([-3.0, 3.0], 1.0, grid_n=GRID_N)
    _expect_error(ERROR_PRECONDITION, entropy.concavity_scan, mixture, orders, grid_n=GRID_N)
    _expect_error(ERROR_DOMAIN, entropy.concavity_scan, densities.normal(1.0), [0.5, 2.0], grid_n=GRID_N)
    print("SUCCESS: n log p + (1-p) h_p is concave in p for log-concave densities.")


def test_shifted_monotonicity() -> None:
    for d in (densities.normal(1.0), densities.exponential(1.0), densities.laplace(1.0)):
        for low, high in ((0.3, 0.5), (0.5, 2.0), (2.0, 3.0)):
            assert entropy.shifted_monotonicity_check(d, low, high, grid_n=GRID_N).passed, (d, low, high)
    _expect_error(ERROR_DOMAIN, entropy.shifted_monotonicity_check, densities.normal(1.0), 1.0, 2.0)
    mixture = densities.normal_mixture([-3.0, 3.0], 1.0, grid_n=GRID_N)
    _expect_error(ERROR_PRECONDITION, entropy.shifted_monotonicity_check, mixture, 0.5, 2.0)
    print("SUCCESS: h_p + n log p/(1-p) is nondecreasing for log-concave densities.")


if __name__ == "__main__":
    test_gaussian_entropy_oracle()
    test_shannon_entropy()
    test_uniform_flatness()
    test_invalid_orders()
    test_product_densities()
    test_entropy_powers()
    test_scaling_shifts_entropy()
    test_kl_divergence()
    test_derivative_identity()
    test_monotonicity()
    test_varentropy()
    test_varentropy_warns_without_log_concavity()
    test_concavity_scan()
    test_shifted_monotonicity()
