import math

import numpy as np

import densities
from errors import ERROR_DOMAIN, ERROR_NON_DIFFEOMORPHIC_TARGET, EpiError
from transport import (
    TransportMap1D,
    invariance_check,
    invariance_gap,
    monotone_transport,
    normal_rotation_check,
    pushforward_check,
    rotation_check,
)

GRID_N = 16384


def _expect_error(code: str, function, *args, **kwargs) -> None:
    try:
        function(*args, **kwargs)
    except EpiError as exc:
        assert exc.code == code, exc.code
    else:
        raise AssertionError(f"Expected {code} from {function.__name__}{args}")


def test_gaussian_map_is_affine() -> None:
    transport = monotone_transport(densities.normal(4.0), 1.0, grid_n=GRID_N)
    slopes = transport.derivative()
    inside = np.abs(transport.xs) <= 5.0
    assert np.max(np.abs(slopes[inside] - 2.0)) < 1e-8
    assert abs(transport(1.0) - 2.0) < 1e-9
    assert transport.is_monotone and transport.violations == 0
    print("SUCCESS: the Normal(1) to Normal(4) map is x -> 2x.")


def test_exponential_pushforward() -> None:
    transport = monotone_transport(densities.exponential(1.0), 1.0, grid_n=GRID_N)
    report = pushforward_check(transport)
    assert report.passed, report.details
    assert report.details["cdf_distance"] < 1e-3
    assert transport.ts.min() >= 0.0
    print("SUCCESS: the exponential pushforward CDF is within 1e-3 of the target.")


def test_bounded_target_is_trimmed() -> None:
    transport = monotone_transport(densities.uniform(0.0, 1.0), 1.0, grid_n=GRID_N)
    assert transport.is_monotone
    assert transport.ts[0] >= 0.0 and transport.ts[-1] <= 1.0
    assert pushforward_check(transport).passed

    # a wide window puts knots where 1 - sf(x) no longer resolves in floating point
    wide = monotone_transport(densities.uniform(0.0, 1.0), 0.5, grid_n=GRID_N, window=densities.window(densities.normal(1.0), 2.0))
    assert wide.is_monotone
    assert wide.xs[-1] < densities.window(densities.normal(1.0), 2.0)[1]
    print("SUCCESS: maps onto bounded supports stay strictly increasing.")


def test_invalid_targets() -> None:
    gapped = densities.grid([0.0, 1.0, 2.0, 3.0, 4.0], [1.0, 1.0, 0.0, 1.0, 1.0])
    _expect_error(ERROR_NON_DIFFEOMORPHIC_TARGET, monotone_transport, gapped, 1.0, grid_n=GRID_N)
    _expect_error(ERROR_DOMAIN, monotone_transport, densities.normal(1.0), 0.0, grid_n=GRID_N)
    print("SUCCESS: gapped targets and invalid sources are rejected.")


def test_non_monotone_map_is_reported() -> None:
    broken = TransportMap1D(
        source_sigma2=1.0,
        target=densities.normal(1.0),
        xs=np.linspace(-1.0, 1.0, 5),
        ts=np.array([-1.0, 0.0, -0.5, 0.5, 1.0]),
    )
    report = pushforward_check(broken)
    assert not report.passed
    assert report.rhs == math.inf
    assert "monotonicity violation at 1 knots" in report.warnings
    print("SUCCESS: non-monotone maps fail the pushforward check with a warning.")


def test_rotations() -> None:
    for lam in (0.1, 0.3, 0.5, 0.7, 0.9):
        pair = normal_rotation_check(lam, 2.0)
        assert pair.max_error < 1e-12
        assert rotation_check(lam, 2.0).passed
    _expect_error(ERROR_DOMAIN, normal_rotation_check, 1.0, 2.0)
    _expect_error(ERROR_DOMAIN, normal_rotation_check, 0.5, -1.0)
    print("SUCCESS: rotations preserve the isotropic covariance and invert exactly.")


def test_transformational_invariance() -> None:
    f = densities.normal(1.0)
    assert invariance_gap(f, densities.escort(f, 2.0), 2.0, grid_n=GRID_N) < 1e-3
    assert invariance_check(f, densities.laplace(2.0), 2.0, grid_n=GRID_N).passed
    exponential = densities.exponential(1.0)
    assert invariance_check(exponential, densities.escort(exponential, 2.0), 2.0, grid_n=GRID_N).passed
    bounded = densities.uniform(0.0, 1.0)
    assert invariance_check(bounded, densities.escort(bounded, 2.0), 2.0, grid_n=GRID_N).passed
    print("SUCCESS: transported and original expectations agree within 1e-3.")


if __name__ == "__main__":
    test_gaussian_map_is_affine()
    test_exponential_pushforward()
    test_bounded_target_is_trimmed()
    test_invalid_targets()
    test_non_monotone_map_is_reported()
    test_rotations()
    test_transformational_invariance()
