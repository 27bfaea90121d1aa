from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

import densities
from densities import Density1D
from density_specs import density_label
from errors import ERROR_NON_DIFFEOMORPHIC_TARGET, EpiError, domain_error
from exponents import Exponent
from quadrature import node_grid, resolve_grid_n
from report_exporter import KIND_INVARIANCE, KIND_PUSHFORWARD, KIND_ROTATION, EpiReport, make_accuracy_report

PUSHFORWARD_TOLERANCE = 1e-3
INVARIANCE_TOLERANCE = 1e-3
ROTATION_TOLERANCE = 1e-12
END_TAIL_PROBABILITY = densities.TAIL_PROBABILITY


@dataclass(frozen=True, eq=False)
class TransportMap1D:
    """Increasing map T with T(X*) ~ target for X* ~ Normal(source_sigma2), sampled at knots."""

    source_sigma2: float
    target: Density1D
    xs: np.ndarray
    ts: np.ndarray

    @property
    def knots(self) -> list[tuple[float, float]]:
        return [(float(x), float(t)) for x, t in zip(self.xs, self.ts)]

    @property
    def violations(self) -> int:
        return int(np.count_nonzero(np.diff(self.ts) <= 0.0))

    @property
    def is_monotone(self) -> bool:
        return self.violations == 0

    def derivative(self) -> np.ndarray:
        return np.gradient(self.ts, self.xs)

    def __call__(self, x: float | np.ndarray) -> float | np.ndarray:
        values = np.interp(np.asarray(x, dtype=float), self.xs, self.ts)
        return float(values) if np.ndim(x) == 0 else values


def _check_target(target: Density1D) -> None:
    if not target.is_grid:
        return
    positive = np.flatnonzero(target.fs > 0.0)
    if len(positive) != positive[-1] - positive[0] + 1:
        raise EpiError(
            ERROR_NON_DIFFEOMORPHIC_TARGET,
            f"{density_label(target)} has zero-density gaps inside its support",
        )


def monotone_transport(
    target: Density1D,
    sigma2: float,
    *,
    grid_n: int | None = None,
    window: tuple[float, float] | None = None,
) -> TransportMap1D:
    if not sigma2 > 0:
        raise domain_error(f"sigma2 must be positive, got {sigma2}")
    _check_target(target)
    source = densities.normal(sigma2)
    lower, upper = window or densities.window(source)
    xs = np.linspace(lower, upper, resolve_grid_n(grid_n) + 1)

    ts = np.empty_like(xs)
    left = xs <= 0.0
    # F^-1(Phi(x)) on the left, the upper-tail quantile of Phi-bar(x) on the right
    ts[left] = densities.quantile(target, densities.cdf(source, xs[left]))
    ts[~left] = densities.upper_quantile(target, densities.sf(source, xs[~left]))

    # next to a finite support end, images of source tails lighter than END_TAIL_PROBABILITY are not resolved
    low_end, high_end = target.support
    keep = np.ones(len(xs), dtype=bool)
    if math.isfinite(low_end):
        keep &= densities.cdf(source, xs) >= END_TAIL_PROBABILITY
    if math.isfinite(high_end):
        keep &= densities.sf(source, xs) >= END_TAIL_PROBABILITY
    if np.count_nonzero(keep) < 3:
        raise domain_error(f"window {lower:g}..{upper:g} holds too little source mass for {density_label(target)}")
    transport = TransportMap1D(source_sigma2=float(sigma2), target=target, xs=xs[keep], ts=ts[keep])
    if not transport.is_monotone:
        raise EpiError(
            ERROR_NON_DIFFEOMORPHIC_TARGET,
            f"transport to {density_label(target)} is not strictly increasing at {transport.violations} knots",
        )
    return transport


def pushforward_distance(transport: TransportMap1D) -> float:
    """Sup distance between the target CDF and the CDF of the knot pushforward of the source normal."""
    source = densities.normal(transport.source_sigma2)
    xs = transport.xs
    step = xs[1] - xs[0]
    cells = densities.cdf(source, xs + 0.5 * step) - densities.cdf(source, xs - 0.5 * step)
    order = np.argsort(transport.ts, kind="stable")
    images = transport.ts[order]
    pushed = densities.cdf(source, xs[0] - 0.5 * step) + np.cumsum(cells[order])
    midpoints = 0.5 * (images[1:] + images[:-1])
    return float(np.max(np.abs(pushed[:-1] - densities.cdf(transport.target, midpoints))))


def pushforward_check(transport: TransportMap1D, *, bound: float = PUSHFORWARD_TOLERANCE) -> EpiReport:
    distance = pushforward_distance(transport)
    warnings = []
    if not transport.is_monotone:
        warnings.append(f"monotonicity violation at {transport.violations} knots")
    return make_accuracy_report(
        KIND_PUSHFORWARD,
        distance if transport.is_monotone else math.inf,
        bound,
        inputs={
            "target": transport.target,
            "sigma2": transport.source_sigma2,
            "knots": len(transport.xs),
        },
        details={"cdf_distance": distance, "monotone": transport.is_monotone},
        warnings=warnings,
    )


@dataclass(frozen=True, eq=False)
class RotationPair:
    lam: float
    covariance_before: np.ndarray
    covariance_after: np.ndarray
    rotation: np.ndarray
    inverse: np.ndarray

    @property
    def isotropy_error(self) -> float:
        return float(np.max(np.abs(self.covariance_after - self.covariance_before)))

    @property
    def orthogonality_error(self) -> float:
        return float(np.max(np.abs(self.rotation @ self.rotation.T - np.eye(2))))

    @property
    def inverse_error(self) -> float:
        return float(np.max(np.abs(self.rotation @ self.inverse - np.eye(2))))

    @property
    def max_error(self) -> float:
        scale = max(1.0, float(np.max(np.abs(self.covariance_before))))
        return max(self.isotropy_error / scale, self.orthogonality_error, self.inverse_error)


def normal_rotation_check(lam: float, sigma2: float) -> RotationPair:
    """Rotate an i.i.d. Normal(sigma2) pair by (sqrt(lam), sqrt(1-lam))."""
    if not 0.0 < lam < 1.0:
        raise domain_error(f"lambda must lie in (0,1), got {lam}")
    if not sigma2 > 0:
        raise domain_error(f"sigma2 must be positive, got {sigma2}")
    a, b = math.sqrt(lam), math.sqrt(1.0 - lam)
    rotation = np.array([[a, b], [-b, a]])
    inverse = np.array([[a, -b], [b, a]])
    before = np.diag([sigma2, sigma2])
    return RotationPair(
        lam=float(lam),
        covariance_before=before,
        covariance_after=rotation @ before @ rotation.T,
        rotation=rotation,
        inverse=inverse,
    )


def rotation_check(lam: float, sigma2: float, *, bound: float = ROTATION_TOLERANCE) -> EpiReport:
    pair = normal_rotation_check(lam, sigma2)
    return make_accuracy_report(
        KIND_ROTATION,
        pair.max_error,
        bound,
        inputs={"lambda": lam, "sigma2": sigma2},
        details={
            "isotropy_error": pair.isotropy_error,
            "orthogonality_error": pair.orthogonality_error,
            "inverse_error": pair.inverse_error,
        },
    )


def invariance_sides(
    f: Density1D,
    phi: Density1D,
    p: Exponent | float,
    sigma2: float = 1.0,
    *,
    grid_n: int | None = None,
) -> tuple[float, float]:
    """Both sides of E[phi*^(1/p')(X*)]/||f*||_p = E[phi^(1/p')(X)]/||f||_p.

    X* ~ Normal(sigma2) is carried onto X ~ f by the map sending the escort
    Normal(sigma2/p) to the escort f_p, and phi*(x) = phi(T(x)) |T'(x)|.
    """
    exponent_p = p if isinstance(p, Exponent) else Exponent.of(p)
    order = exponent_p.p
    power = 1.0 / exponent_p.p_prime
    grid_n = resolve_grid_n(grid_n)

    norm_f = densities.power_integral(f, order, grid_n=grid_n)[0] ** (1.0 / order)
    right = densities.power_expectation(f, phi, power, order, grid_n=grid_n) / norm_f

    source = densities.normal(sigma2)
    transport = monotone_transport(
        densities.escort(f, order),
        sigma2 / order,
        grid_n=grid_n,
        window=densities.window(source, order),
    )
    slopes = np.abs(transport.derivative())
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        pulled = densities.pdf(phi, transport.ts) * slopes
        integrand = densities.pdf(source, transport.xs) * np.power(pulled, power)
    integrand = np.where(np.isfinite(integrand), integrand, 0.0)
    norm_source = densities.power_integral(source, order, grid_n=grid_n)[0] ** (1.0 / order)
    left = node_grid(transport.xs).integrate(lambda _: integrand) / norm_source
    return left, right


def invariance_gap(
    f: Density1D,
    phi: Density1D,
    p: Exponent | float,
    sigma2: float = 1.0,
    *,
    grid_n: int | None = None,
) -> float:
    left, right = invariance_sides(f, phi, p, sigma2, grid_n=grid_n)
    return abs(left - right) / abs(right)


def invariance_check(
    f: Density1D,
    phi: Density1D,
    p: Exponent | float,
    sigma2: float = 1.0,
    *,
    bound: float = INVARIANCE_TOLERANCE,
    grid_n: int | None = None,
) -> EpiReport:
    left, right = invariance_sides(f, phi, p, sigma2, grid_n=grid_n)
    return make_accuracy_report(
        KIND_INVARIANCE,
        abs(left - right) / abs(right),
        bound,
        inputs={"f": f, "phi": phi, "p": float(p), "sigma2": sigma2},
        r=float(p),
        details={"transported": left, "original": right},
    )
