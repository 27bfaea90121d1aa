from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
import math
from types import MappingProxyType
from typing import Any, Mapping, Sequence

import numpy as np
from scipy import stats
from scipy.integrate import cumulative_trapezoid, trapezoid

from errors import ERROR_NON_INTEGRABLE, EpiError, domain_error
from exponents import Exponent
from quadrature import QuadratureGrid, node_grid, piecewise_grid, relative_change, resolve_grid_n

KIND_NORMAL = "normal"
KIND_UNIFORM = "uniform"
KIND_EXPONENTIAL = "exponential"
KIND_LAPLACE = "laplace"
KIND_GRID = "grid"

ANALYTIC_KINDS = frozenset({KIND_NORMAL, KIND_UNIFORM, KIND_EXPONENTIAL, KIND_LAPLACE})
DENSITY_KINDS = ANALYTIC_KINDS | {KIND_GRID}

TAIL_PROBABILITY = 1e-9
WINDOW_PADDING = 0.10
LOG_FLOOR = 1e-300
MASS_TOLERANCE = 1e-8
GRID_SPACING_TOLERANCE = 1e-6
LOG_CONCAVITY_TOLERANCE = 1e-8
ROUNDOFF_FLOOR = 1e-14
INTEGRABILITY_TOLERANCE = 1e-6

_LOG_FLOOR = math.log(LOG_FLOOR)


@dataclass(frozen=True, eq=False)
class Density1D:
    """A 1-D density: one of the analytic families or a tabulation on a uniform grid.

    Build instances with the module constructors (normal, uniform, exponential,
    laplace, grid) so parameters are validated and grids normalised.
    """

    kind: str
    params: Mapping[str, float] = field(default_factory=lambda: MappingProxyType({}))
    xs: np.ndarray | None = None
    fs: np.ndarray | None = None

    @cached_property
    def frozen(self) -> Any:
        if self.kind == KIND_NORMAL:
            return stats.norm(loc=self.params["mean"], scale=math.sqrt(self.params["sigma2"]))
        if self.kind == KIND_UNIFORM:
            return stats.uniform(loc=self.params["a"], scale=self.params["b"] - self.params["a"])
        if self.kind == KIND_EXPONENTIAL:
            return stats.expon(scale=1.0 / self.params["rate"])
        if self.kind == KIND_LAPLACE:
            return stats.laplace(loc=self.params["loc"], scale=self.params["scale"])
        raise domain_error("grid densities have no analytic representation")

    @cached_property
    def cumulative(self) -> np.ndarray:
        cells = 0.5 * (self.fs[1:] + self.fs[:-1]) * self.dx
        return np.concatenate(([0.0], np.cumsum(cells)))

    @cached_property
    def survival(self) -> np.ndarray:
        cells = 0.5 * (self.fs[1:] + self.fs[:-1]) * self.dx
        return np.concatenate((np.cumsum(cells[::-1])[::-1], [0.0]))

    @property
    def is_grid(self) -> bool:
        return self.kind == KIND_GRID

    @property
    def dx(self) -> float:
        if self.xs is None:
            raise domain_error("analytic densities have no grid spacing")
        return float(self.xs[1] - self.xs[0])

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == KIND_UNIFORM:
            return self.params["a"], self.params["b"]
        if self.kind == KIND_EXPONENTIAL:
            return 0.0, math.inf
        if self.kind == KIND_GRID:
            return float(self.xs[0]), float(self.xs[-1])
        return -math.inf, math.inf

    def __repr__(self) -> str:
        if self.is_grid:
            return f"Density1D(grid, n={len(self.xs)}, [{self.xs[0]:.6g}, {self.xs[-1]:.6g}])"
        inner = ", ".join(f"{key}={value:.6g}" for key, value in self.params.items())
        return f"Density1D({self.kind}, {inner})"


def _positive(value: float, field_name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise domain_error(f"{field_name} must be a positive real, got {value}")
    return value


def _finite(value: float, field_name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise domain_error(f"{field_name} must be finite, got {value}")
    return value


def _analytic(kind: str, **params: float) -> Density1D:
    return Density1D(kind=kind, params=MappingProxyType(dict(params)))


def normal(sigma2: float, mean: float = 0.0) -> Density1D:
    return _analytic(KIND_NORMAL, sigma2=_positive(sigma2, "sigma2"), mean=_finite(mean, "mean"))


def uniform(a: float, b: float) -> Density1D:
    a, b = _finite(a, "a"), _finite(b, "b")
    if b <= a:
        raise domain_error(f"uniform needs a < b, got a={a}, b={b}")
    return _analytic(KIND_UNIFORM, a=a, b=b)


def exponential(rate: float) -> Density1D:
    return _analytic(KIND_EXPONENTIAL, rate=_positive(rate, "rate"))


def laplace(scale: float, loc: float = 0.0) -> Density1D:
    return _analytic(KIND_LAPLACE, scale=_positive(scale, "scale"), loc=_finite(loc, "loc"))


def grid(xs: Sequence[float] | np.ndarray, fs: Sequence[float] | np.ndarray) -> Density1D:
    xs = np.array(xs, dtype=float)
    fs = np.array(fs, dtype=float)
    if xs.ndim != 1 or xs.shape != fs.shape:
        raise domain_error("grid xs and fs must be 1-D arrays of equal length")
    if len(xs) < 3:
        raise domain_error("a grid density needs at least 3 points")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(fs))):
        raise domain_error("grid values must be finite")
    steps = np.diff(xs)
    step = (xs[-1] - xs[0]) / (len(xs) - 1)
    if step <= 0 or np.max(np.abs(steps - step)) > GRID_SPACING_TOLERANCE * step:
        raise domain_error("grid spacing must be strictly positive and uniform")
    if np.any(fs < 0):
        raise domain_error("grid density values must be nonnegative")
    mass = float(trapezoid(fs, xs))
    if mass <= 0:
        raise domain_error("grid density has zero mass")
    xs = np.linspace(xs[0], xs[-1], len(xs))
    fs = fs / mass
    xs.setflags(write=False)
    fs.setflags(write=False)
    return Density1D(kind=KIND_GRID, xs=xs, fs=fs)


def grid_from_range(xs_min: float, xs_max: float, fs: Sequence[float]) -> Density1D:
    fs = np.asarray(fs, dtype=float)
    if _finite(xs_max, "xs_max") <= _finite(xs_min, "xs_min"):
        raise domain_error("xs_max must exceed xs_min")
    return grid(np.linspace(xs_min, xs_max, len(fs)), fs)


def tabulate(d: Density1D, grid_n: int | None = None) -> Density1D:
    if d.is_grid:
        return d
    lower, upper = window(d)
    xs = np.linspace(lower, upper, resolve_grid_n(grid_n) + 1)
    return grid(xs, pdf(d, xs))


def normal_mixture(
    means: Sequence[float],
    sigma2: float,
    weights: Sequence[float] | None = None,
    *,
    grid_n: int | None = None,
) -> Density1D:
    """Tabulated mixture of equal-variance normals (non-log-concave when the means separate)."""
    means = np.asarray([_finite(mean, "means") for mean in means], dtype=float)
    sigma2 = _positive(sigma2, "sigma2")
    if len(means) < 1:
        raise domain_error("a mixture needs at least one component")
    if weights is None:
        weights = np.full(len(means), 1.0 / len(means))
    weights = np.asarray(weights, dtype=float)
    if weights.shape != means.shape or np.any(weights <= 0):
        raise domain_error("mixture weights must be positive and match the means")
    weights = weights / weights.sum()
    sigma = math.sqrt(sigma2)
    half = stats.norm.isf(TAIL_PROBABILITY) * sigma * (1.0 + 2 * WINDOW_PADDING)
    xs = np.linspace(means.min() - half, means.max() + half, resolve_grid_n(grid_n) + 1)
    fs = np.sum(weights[:, None] * stats.norm.pdf(xs[None, :], loc=means[:, None], scale=sigma), axis=0)
    return grid(xs, fs)


def pdf(d: Density1D, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if d.is_grid:
        return np.interp(xs, d.xs, d.fs, left=0.0, right=0.0)
    return d.frozen.pdf(xs)


def evaluate(d: Density1D, x: float) -> float:
    return float(pdf(d, np.asarray([x], dtype=float))[0])


def log_density(d: Density1D, xs: np.ndarray) -> np.ndarray:
    if d.is_grid:
        return np.log(np.maximum(pdf(d, xs), LOG_FLOOR))
    with np.errstate(divide="ignore"):
        return np.maximum(d.frozen.logpdf(np.asarray(xs, dtype=float)), _LOG_FLOOR)


def power(d: Density1D, xs: np.ndarray, p: float) -> np.ndarray:
    if d.is_grid:
        return np.power(pdf(d, xs), p)
    with np.errstate(divide="ignore", over="ignore"):
        return np.exp(p * d.frozen.logpdf(np.asarray(xs, dtype=float)))


def cdf(d: Density1D, x: float | np.ndarray) -> float | np.ndarray:
    values = np.asarray(x, dtype=float)
    if d.is_grid:
        result = np.interp(values, d.xs, d.cumulative, left=0.0, right=1.0)
    else:
        result = d.frozen.cdf(values)
    return float(result) if np.ndim(x) == 0 else result


def sf(d: Density1D, x: float | np.ndarray) -> float | np.ndarray:
    values = np.asarray(x, dtype=float)
    if d.is_grid:
        result = np.interp(values, d.xs, d.survival, left=1.0, right=0.0)
    else:
        result = d.frozen.sf(values)
    return float(result) if np.ndim(x) == 0 else result


def _check_probabilities(u: np.ndarray, field_name: str) -> None:
    if np.any(~np.isfinite(u)) or np.any(u <= 0.0) or np.any(u >= 1.0):
        raise domain_error(f"{field_name} must lie in (0,1)")


def _invert_increasing(levels: np.ndarray, targets: np.ndarray, xs: np.ndarray) -> np.ndarray:
    index = np.clip(np.searchsorted(levels, targets, side="left"), 1, len(xs) - 1)
    left, right = levels[index - 1], levels[index]
    span = np.where(right > left, right - left, 1.0)
    fraction = np.clip((targets - left) / span, 0.0, 1.0)
    return xs[index - 1] + fraction * (xs[index] - xs[index - 1])


def quantile(d: Density1D, u: float | np.ndarray) -> float | np.ndarray:
    values = np.asarray(u, dtype=float)
    _check_probabilities(values, "quantile level")
    if d.is_grid:
        result = _invert_increasing(d.cumulative, values, d.xs)
    else:
        result = d.frozen.ppf(values)
    return float(result) if np.ndim(u) == 0 else result


def upper_quantile(d: Density1D, s: float | np.ndarray) -> float | np.ndarray:
    """Inverse survival function: the x with P(X > x) = s."""
    values = np.asarray(s, dtype=float)
    _check_probabilities(values, "tail probability")
    if d.is_grid:
        result = _invert_increasing(-d.survival, -values, d.xs)
    else:
        result = d.frozen.isf(values)
    return float(result) if np.ndim(s) == 0 else result


def mean(d: Density1D) -> float:
    if d.is_grid:
        return float(trapezoid(d.xs * d.fs, d.xs))
    return float(d.frozen.mean())


def variance(d: Density1D) -> float:
    if d.is_grid:
        center = mean(d)
        return float(trapezoid((d.xs - center) ** 2 * d.fs, d.xs))
    return float(d.frozen.var())


def _order_value(p: Exponent | float) -> float:
    value = float(p)
    if not math.isfinite(value) or value <= 0:
        raise domain_error(f"order must be a positive real, got {value}")
    return value


def window(d: Density1D, order: Exponent | float = 1.0, widen: float = 1.0) -> tuple[float, float]:
    """Finite integration window covering d and its escort of the given order."""
    order = _order_value(order)
    if d.kind == KIND_UNIFORM or d.is_grid:
        return d.support
    if d.kind == KIND_NORMAL:
        sigma = math.sqrt(d.params["sigma2"] * max(1.0, 1.0 / order))
        half = stats.norm.isf(TAIL_PROBABILITY) * sigma * (1.0 + 2 * WINDOW_PADDING) * widen
        return d.params["mean"] - half, d.params["mean"] + half
    if d.kind == KIND_EXPONENTIAL:
        rate = d.params["rate"] * min(1.0, order)
        upper = stats.expon.isf(TAIL_PROBABILITY) / rate * (1.0 + WINDOW_PADDING) * widen
        return 0.0, upper
    scale = d.params["scale"] / min(1.0, order)
    half = stats.laplace.isf(TAIL_PROBABILITY) * scale * (1.0 + 2 * WINDOW_PADDING) * widen
    return d.params["loc"] - half, d.params["loc"] + half


def breakpoints(d: Density1D) -> tuple[float, ...]:
    if d.kind == KIND_UNIFORM:
        return d.params["a"], d.params["b"]
    if d.kind == KIND_EXPONENTIAL:
        return (0.0,)
    if d.kind == KIND_LAPLACE:
        return (d.params["loc"],)
    if d.is_grid:
        return float(d.xs[0]), float(d.xs[-1])
    return ()


def quadrature_grid(
    densities: Sequence[Density1D],
    order: Exponent | float = 1.0,
    *,
    grid_n: int | None = None,
    widen: float = 1.0,
) -> QuadratureGrid:
    grid_n = resolve_grid_n(grid_n)
    first = densities[0]
    if all(d.is_grid for d in densities) and all(
        len(d.xs) == len(first.xs) and np.array_equal(d.xs, first.xs) for d in densities
    ):
        return node_grid(first.xs)
    windows = [window(d, order, widen) for d in densities]
    lower = min(low for low, _ in windows)
    upper = max(high for _, high in windows)
    points = [point for d in densities for point in breakpoints(d)]
    return piecewise_grid(lower, upper, points, int(grid_n * widen))


def power_integral(d: Density1D, p: Exponent | float, *, grid_n: int | None = None) -> tuple[float, float]:
    """∫ f^p on the window, plus the same sum at half resolution.

    For p < 1 the integral is repeated on a window twice as wide; a relative
    change above INTEGRABILITY_TOLERANCE means f^p is not integrable.
    """
    order = _order_value(p)
    integrand = lambda xs: power(d, xs, order)  # noqa: E731
    value, halved = quadrature_grid([d], order, grid_n=grid_n).integrate_with_halving(integrand)
    if not math.isfinite(value) or value <= 0:
        raise EpiError(ERROR_NON_INTEGRABLE, f"integral of f^{order} is not finite and positive for {d!r}")
    if order < 1.0 and not d.is_grid:
        wider = quadrature_grid([d], order, grid_n=grid_n, widen=2.0).integrate(integrand)
        if not math.isfinite(wider) or relative_change(wider, value) > INTEGRABILITY_TOLERANCE:
            raise EpiError(
                ERROR_NON_INTEGRABLE,
                f"integral of f^{order} changes by more than {INTEGRABILITY_TOLERANCE:g} when the window doubles",
            )
    return value, halved


def power_expectation(
    f: Density1D,
    phi: Density1D,
    exponent: float,
    p: Exponent | float = 1.0,
    *,
    grid_n: int | None = None,
) -> float:
    """E_f[phi(X)^exponent], integrated on the windows of f and phi at order p."""

    def integrand(xs: np.ndarray) -> np.ndarray:
        weights = pdf(f, xs)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            values = weights * power(phi, xs, exponent)
        return np.where(weights > 0, values, 0.0)

    value = quadrature_grid([f, phi], p, grid_n=grid_n).integrate(integrand)
    if not math.isfinite(value) or value <= 0:
        raise EpiError(ERROR_NON_INTEGRABLE, f"E[phi^{exponent:g}] is not finite and positive for {f!r}, {phi!r}")
    if not (f.is_grid and phi.is_grid):
        wider = quadrature_grid([f, phi], p, grid_n=grid_n, widen=2.0).integrate(integrand)
        if not math.isfinite(wider) or relative_change(wider, value) > INTEGRABILITY_TOLERANCE:
            raise EpiError(
                ERROR_NON_INTEGRABLE,
                f"E[phi^{exponent:g}] changes by more than {INTEGRABILITY_TOLERANCE:g} when the window doubles",
            )
    return value


def escort(d: Density1D, p: Exponent | float) -> Density1D:
    order = _order_value(p)
    if order == 1.0 or d.kind == KIND_UNIFORM:
        return d
    if d.kind == KIND_NORMAL:
        return normal(d.params["sigma2"] / order, d.params["mean"])
    if d.kind == KIND_EXPONENTIAL:
        return exponential(d.params["rate"] * order)
    if d.kind == KIND_LAPLACE:
        return laplace(d.params["scale"] / order, d.params["loc"])
    return grid(d.xs, np.power(d.fs, order))


def scale(d: Density1D, a: float, *, grid_n: int | None = None) -> Density1D:
    a = float(a)
    if a == 0.0 or not math.isfinite(a):
        raise domain_error("scale factor must be a nonzero real")
    if d.kind == KIND_NORMAL:
        return normal(d.params["sigma2"] * a * a, d.params["mean"] * a)
    if d.kind == KIND_UNIFORM:
        low, high = sorted((d.params["a"] * a, d.params["b"] * a))
        return uniform(low, high)
    if d.kind == KIND_LAPLACE:
        return laplace(d.params["scale"] * abs(a), d.params["loc"] * a)
    if d.kind == KIND_EXPONENTIAL and a > 0:
        return exponential(d.params["rate"] / a)
    tabulated = tabulate(d, grid_n)
    xs = tabulated.xs * a
    fs = tabulated.fs / abs(a)
    if a < 0:
        xs, fs = xs[::-1], fs[::-1]
    return grid(xs, fs)


def is_log_concave(d: Density1D) -> bool:
    """Second differences of log f on the grid, up to round-off in the tails.

    Values below ROUNDOFF_FLOOR * peak are treated as zero. Above it, each
    second difference may exceed LOG_CONCAVITY_TOLERANCE only by the error a
    ROUNDOFF_FLOOR * peak perturbation of the three values can cause.
    """
    if not d.is_grid:
        return True
    fs = np.asarray(d.fs)
    peak = float(fs.max())
    floor = ROUNDOFF_FLOOR * peak
    inside = np.flatnonzero(fs > floor)
    if inside[-1] - inside[0] + 1 != len(inside):
        return False
    values = fs[inside[0] : inside[-1] + 1]
    if len(values) < 3:
        return True
    slack = 4.0 * floor / np.minimum(np.minimum(values[:-2], values[1:-1]), values[2:])
    return bool(np.all(np.diff(np.log(values), 2) <= LOG_CONCAVITY_TOLERANCE + slack))
