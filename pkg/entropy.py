from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Sequence, Union

import numpy as np
from scipy import special

import densities
from densities import Density1D
from density_specs import density_label
from errors import ERROR_PRECONDITION, EpiError, domain_error
from exponents import Exponent
from report_exporter import (
    KIND_CONCAVITY,
    KIND_DERIVATIVE_IDENTITY,
    KIND_MONOTONICITY,
    KIND_SHIFTED_MONOTONICITY,
    KIND_VARENTROPY,
    EpiReport,
    make_accuracy_report,
    make_report,
)

SHANNON = "shannon"
SHANNON_BRIDGE = 1e-4
RESOLUTION_TOLERANCE = 1e-6
MONOTONICITY_TOLERANCE = 1e-8
CONCAVITY_TOLERANCE = 1e-6
VARENTROPY_TOLERANCE = 1e-8
DERIVATIVE_TOLERANCE = 1e-4
SUPPORT_MASS_THRESHOLD = 1e-9

Order = Union[Exponent, float, int, str]
DensityLike = Union[Density1D, Sequence[Density1D]]


@dataclass(frozen=True)
class EntropyValue:
    order: Exponent | str
    nats: float
    dimension: int = 1
    warnings: tuple[str, ...] = ()

    @property
    def is_shannon(self) -> bool:
        return self.order == SHANNON


@dataclass(frozen=True)
class VarentropyResult:
    value: float
    bound: float
    order: float
    dimension: int
    bound_asserted: bool
    warnings: tuple[str, ...] = ()

    @property
    def within_bound(self) -> bool:
        return self.value <= self.bound + VARENTROPY_TOLERANCE


def _order_value(p: Order) -> float | None:
    """Numeric order, or None for the Shannon entropy."""
    if isinstance(p, str):
        if p != SHANNON:
            raise domain_error(f"unknown order marker {p!r}")
        return None
    value = float(p)
    if not math.isfinite(value) or value <= 0:
        raise domain_error(f"order must be a positive real, got {value}")
    return None if value == 1.0 else value


def _coordinates(density: DensityLike) -> list[Density1D]:
    if isinstance(density, Density1D):
        return [density]
    parts = list(density)
    if not parts or not all(isinstance(part, Density1D) for part in parts):
        raise domain_error("a product density needs at least one Density1D coordinate")
    return parts


def _is_shannon_bridge(order: float | None) -> bool:
    return order is None or abs(order - 1.0) < SHANNON_BRIDGE


def _resolution_warning(d: Density1D, label: str, delta: float) -> str | None:
    if math.isfinite(delta) and delta < RESOLUTION_TOLERANCE:
        return None
    return f"resolution warning: halving the grid moves {label} of {density_label(d)} by {delta:.3g} nats"


def _shannon_terms(d: Density1D, grid_n: int | None) -> tuple[float, float, float]:
    grid = densities.quadrature_grid([d], 1.0, grid_n=grid_n)
    values = grid.sample(lambda xs: densities.pdf(d, xs))
    logs = grid.sample(lambda xs: densities.log_density(d, xs))
    entr = [special.entr(f) for f in values]
    h1 = grid.integrate_samples(entr)
    h1_half = grid.integrate_samples(entr, halved=True)
    spread = [f * (log_f + h1) ** 2 for f, log_f in zip(values, logs)]
    return h1, h1_half, grid.integrate_samples(spread)


def _renyi_1d(d: Density1D, order: float | None, grid_n: int | None) -> tuple[float, list[str]]:
    if _is_shannon_bridge(order):
        h1, h1_half, spread = _shannon_terms(d, grid_n)
        warning = _resolution_warning(d, "h_1", abs(h1 - h1_half))
        # first-order correction from dh_p/dp = -Var(log f)/2 at p = 1
        nats = h1 if order is None else h1 - (order - 1.0) * spread / 2.0
        return nats, [warning] if warning else []
    integral, halved = densities.power_integral(d, order, grid_n=grid_n)
    nats = math.log(integral) / (1.0 - order)
    half_nats = math.log(halved) / (1.0 - order) if halved > 0 else math.nan
    warning = _resolution_warning(d, f"h_{order:g}", abs(nats - half_nats))
    return nats, [warning] if warning else []


def renyi_entropy(density: DensityLike, p: Order, *, grid_n: int | None = None) -> EntropyValue:
    order = _order_value(p)
    total = 0.0
    warnings: list[str] = []
    coordinates = _coordinates(density)
    for part in coordinates:
        nats, part_warnings = _renyi_1d(part, order, grid_n)
        total += nats
        warnings.extend(part_warnings)
    return EntropyValue(
        order=SHANNON if order is None else Exponent.of(order),
        nats=total,
        dimension=len(coordinates),
        warnings=tuple(warnings),
    )


def normal_entropy_closed_form(sigma2: float, n: int = 1, p: Order = SHANNON) -> EntropyValue:
    if not sigma2 > 0:
        raise domain_error(f"sigma2 must be positive, got {sigma2}")
    if n < 1:
        raise domain_error(f"dimension must be >= 1, got {n}")
    order = _order_value(p)
    if order is None:
        shift = 0.5
    else:
        shift = 0.5 * math.log1p(order - 1.0) / (order - 1.0)
    return EntropyValue(
        order=SHANNON if order is None else Exponent.of(order),
        nats=n * (0.5 * math.log(2.0 * math.pi * sigma2) + shift),
        dimension=n,
    )


def entropy_power(density: DensityLike, r: Order, n: int | None = None, *, grid_n: int | None = None) -> float:
    value = renyi_entropy(density, r, grid_n=grid_n)
    dimension = value.dimension if n is None else n
    if dimension < 1:
        raise domain_error(f"dimension must be >= 1, got {dimension}")
    return math.exp(2.0 * value.nats / dimension)


def normal_entropy_power(sigma2: float, r: Order) -> float:
    """N_r of Normal(sigma2): 2*pi*sigma2*r^(r'/r), or 2*pi*e*sigma2 for Shannon."""
    return math.exp(2.0 * normal_entropy_closed_form(sigma2, 1, r).nats)


def equivalent_normal_variance(density: DensityLike, r: Order, *, grid_n: int | None = None) -> float:
    return entropy_power(density, r, grid_n=grid_n) / normal_entropy_power(1.0, r)


def kl_divergence(f: Density1D, g: Density1D, *, grid_n: int | None = None) -> float:
    grid = densities.quadrature_grid([f, g], 1.0, grid_n=grid_n)
    f_values = grid.sample(lambda xs: densities.pdf(f, xs))
    g_values = grid.sample(lambda xs: densities.pdf(g, xs))
    log_f = grid.sample(lambda xs: densities.log_density(f, xs))
    log_g = grid.sample(lambda xs: densities.log_density(g, xs))

    outside = [np.where(gv == 0.0, fv, 0.0) for fv, gv in zip(f_values, g_values)]
    if grid.integrate_samples(outside) > SUPPORT_MASS_THRESHOLD:
        return math.inf
    terms = [
        np.where((fv == 0.0) | (gv == 0.0), 0.0, fv * (lf - lg))
        for fv, gv, lf, lg in zip(f_values, g_values, log_f, log_g)
    ]
    return max(grid.integrate_samples(terms), 0.0)


def derivative_identity_gap(d: Density1D, p: Order, h: float = 1e-4, *, grid_n: int | None = None) -> float:
    order = _order_value(p)
    if order is None:
        raise domain_error("the derivative identity is stated for p != 1")
    if not 0 < h < order:
        raise domain_error(f"step must lie in (0, p), got {h}")
    upper = renyi_entropy(d, order + h, grid_n=grid_n).nats
    lower = renyi_entropy(d, order - h, grid_n=grid_n).nats
    slope = (upper - lower) / (2.0 * h)
    identity = -kl_divergence(densities.escort(d, order), d, grid_n=grid_n) / (1.0 - order) ** 2
    return abs(slope - identity)


def derivative_identity_check(
    d: Density1D,
    p: Order,
    h: float = 1e-4,
    *,
    bound: float = DERIVATIVE_TOLERANCE,
    grid_n: int | None = None,
) -> EpiReport:
    gap = derivative_identity_gap(d, p, h, grid_n=grid_n)
    return make_accuracy_report(
        KIND_DERIVATIVE_IDENTITY,
        gap,
        bound,
        inputs={"density": d, "p": float(p), "h": h},
        r=float(p),
    )


def monotonicity_check(
    density: DensityLike,
    p: Order,
    q: Order,
    *,
    tolerance: float = MONOTONICITY_TOLERANCE,
    grid_n: int | None = None,
) -> EpiReport:
    low = _order_value(p) or 1.0
    high = _order_value(q) or 1.0
    if not low < high:
        raise domain_error(f"monotonicity needs p < q, got p={low}, q={high}")
    h_p = renyi_entropy(density, p, grid_n=grid_n)
    h_q = renyi_entropy(density, q, grid_n=grid_n)
    return make_report(
        KIND_MONOTONICITY,
        h_p.nats,
        h_q.nats,
        tolerance=tolerance,
        inputs={"density": _coordinates(density), "p": low, "q": high},
        details={"p": low, "q": high},
        warnings=h_p.warnings + h_q.warnings,
    )


def _require_log_concave(coordinates: list[Density1D], operation: str) -> None:
    for part in coordinates:
        if not densities.is_log_concave(part):
            raise EpiError(ERROR_PRECONDITION, f"{operation} needs log-concave densities; {density_label(part)} is not")


def varentropy(density: DensityLike, p: Order, *, grid_n: int | None = None) -> VarentropyResult:
    """Var log f(X_p) under the escort X_p, against the log-concave bound n/p^2."""
    order = _order_value(p) or 1.0
    coordinates = _coordinates(density)
    total = 0.0
    warnings: list[str] = []
    for part in coordinates:
        tilted = densities.escort(part, order)
        grid = densities.quadrature_grid([part, tilted], order, grid_n=grid_n)
        weights = grid.sample(lambda xs: densities.pdf(tilted, xs))
        logs = grid.sample(lambda xs: densities.log_density(part, xs))
        mass = grid.integrate_samples(weights)
        center = grid.integrate_samples([w * log_f for w, log_f in zip(weights, logs)]) / mass
        total += grid.integrate_samples([w * (log_f - center) ** 2 for w, log_f in zip(weights, logs)]) / mass
    asserted = all(densities.is_log_concave(part) for part in coordinates)
    if not asserted:
        warnings.append("bound not asserted: density is not log-concave")
    return VarentropyResult(
        value=max(total, 0.0),
        bound=len(coordinates) / order**2,
        order=order,
        dimension=len(coordinates),
        bound_asserted=asserted,
        warnings=tuple(warnings),
    )


def varentropy_check(density: DensityLike, p: Order, *, grid_n: int | None = None) -> EpiReport:
    result = varentropy(density, p, grid_n=grid_n)
    return make_report(
        KIND_VARENTROPY,
        result.bound,
        result.value,
        tolerance=VARENTROPY_TOLERANCE,
        inputs={"density": _coordinates(density), "p": result.order},
        r=result.order,
        details={"bound_asserted": result.bound_asserted},
        warnings=result.warnings,
    )


def _concavity_profile(density: DensityLike, ps: Sequence[float], grid_n: int | None) -> float:
    coordinates = _coordinates(density)
    _require_log_concave(coordinates, "the concavity scan")
    orders = np.unique(np.asarray([float(p) for p in ps], dtype=float))
    if len(orders) < 3 or orders[0] <= 0:
        raise domain_error("the concavity scan needs at least three positive orders")
    n = len(coordinates)
    values = np.array(
        [
            0.0 if order == 1.0 else n * math.log(order) + (1.0 - order) * renyi_entropy(coordinates, order, grid_n=grid_n).nats
            for order in orders
        ]
    )
    slopes = np.diff(values) / np.diff(orders)
    spacing = float(np.mean(np.diff(orders)))
    # second divided differences scaled back to plain second differences on a uniform grid
    curvature = np.diff(slopes) * spacing
    return float(curvature.max())


def concavity_scan(
    density: DensityLike,
    ps: Sequence[float],
    *,
    tolerance: float = CONCAVITY_TOLERANCE,
    grid_n: int | None = None,
) -> bool:
    return _concavity_profile(density, ps, grid_n) <= tolerance


def concavity_check(
    density: DensityLike,
    ps: Sequence[float],
    *,
    tolerance: float = CONCAVITY_TOLERANCE,
    grid_n: int | None = None,
) -> EpiReport:
    worst = _concavity_profile(density, ps, grid_n)
    return make_report(
        KIND_CONCAVITY,
        0.0,
        worst,
        tolerance=tolerance,
        inputs={"density": _coordinates(density), "orders": [float(p) for p in ps]},
        details={"max_second_difference": worst},
    )


def shifted_monotonicity_check(
    density: DensityLike,
    p: Order,
    q: Order,
    *,
    tolerance: float = MONOTONICITY_TOLERANCE,
    grid_n: int | None = None,
) -> EpiReport:
    coordinates = _coordinates(density)
    _require_log_concave(coordinates, "the shifted monotonicity check")
    low, high = _order_value(p), _order_value(q)
    if low is None or high is None:
        raise domain_error("the shifted monotonicity check needs p, q != 1")
    if not low < high:
        raise domain_error(f"shifted monotonicity needs p < q, got p={low}, q={high}")
    n = len(coordinates)
    h_p = renyi_entropy(coordinates, low, grid_n=grid_n)
    h_q = renyi_entropy(coordinates, high, grid_n=grid_n)
    shifted_p = h_p.nats + n * math.log(low) / (1.0 - low)
    shifted_q = h_q.nats + n * math.log(high) / (1.0 - high)
    return make_report(
        KIND_SHIFTED_MONOTONICITY,
        shifted_q,
        shifted_p,
        tolerance=tolerance,
        inputs={"density": coordinates, "p": low, "q": high},
        details={"p": low, "q": high},
        warnings=h_p.warnings + h_q.warnings,
    )
