from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Sequence

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import fftconvolve

from config import Config
import densities
from densities import Density1D
from errors import ERROR_GRID_COVERAGE, EpiError, domain_error
from exponents import WeightVector
from quadrature import resolve_grid_n

RENORMALIZATION_TOLERANCE = 1e-6
LATTICE_PADDING = 5


@dataclass(frozen=True)
class SumSpec:
    """Independent sum a_1 X_1 + ... + a_m X_m.

    tail_order is the Rényi order the sum will be integrated at; part windows
    cover the escort of that order so heavy escort tails survive for r < 1.
    """

    parts: tuple[tuple[Density1D, float], ...]
    tail_order: float = 1.0

    def __post_init__(self) -> None:
        if len(self.parts) < 2:
            raise domain_error("a sum needs at least two parts")
        for index, (part, coefficient) in enumerate(self.parts):
            if not isinstance(part, Density1D):
                raise domain_error(f"parts[{index}] is not a density")
            if not math.isfinite(coefficient) or coefficient == 0.0:
                raise domain_error(f"parts[{index}] coefficient must be a nonzero real, got {coefficient}")
        if not (math.isfinite(self.tail_order) and self.tail_order > 0):
            raise domain_error(f"tail order must be a positive real, got {self.tail_order}")

    @property
    def densities(self) -> list[Density1D]:
        return [part for part, _ in self.parts]

    @property
    def coefficients(self) -> list[float]:
        return [coefficient for _, coefficient in self.parts]


def sum_spec(
    parts: Sequence[Density1D],
    coefficients: Sequence[float] | None = None,
    *,
    tail_order: float = 1.0,
) -> SumSpec:
    if coefficients is None:
        coefficients = [1.0] * len(parts)
    if len(coefficients) != len(parts):
        raise domain_error("one coefficient per part is required")
    return SumSpec(
        parts=tuple((part, float(coefficient)) for part, coefficient in zip(parts, coefficients)),
        tail_order=float(tail_order),
    )


def sqrt_lambda_spec(parts: Sequence[Density1D], weights: WeightVector, *, tail_order: float = 1.0) -> SumSpec:
    """Sum of sqrt(lambda_i) X_i."""
    if weights.m != len(parts):
        raise domain_error(f"{len(parts)} parts need {len(parts)} weights, got {weights.m}")
    return sum_spec(parts, [math.sqrt(value) for value in weights.lambdas], tail_order=tail_order)


def _normal_closed_form(spec: SumSpec) -> Density1D:
    sigma2 = math.fsum(a * a * part.params["sigma2"] for part, a in spec.parts)
    mean = math.fsum(a * part.params["mean"] for part, a in spec.parts)
    return densities.normal(sigma2, mean)


def _spacing(d: Density1D, order: float, grid_n: int) -> float:
    if d.is_grid:
        return d.dx
    lower, upper = densities.window(d, order)
    return (upper - lower) / grid_n


def _lattice_masses(d: Density1D, step: float, order: float) -> tuple[int, np.ndarray]:
    """Cell masses of d on the lattice step*k; returns the first index and the masses."""
    lower, upper = densities.window(d, order)
    start = math.floor(lower / step) - 1
    stop = math.ceil(upper / step) + 1
    centers = np.arange(start, stop + 1) * step
    left, right = centers - 0.5 * step, centers + 0.5 * step
    # upper-tail cells use survival differences to keep relative accuracy
    median = densities.quantile(d, 0.5)
    lower_cells = densities.cdf(d, right) - densities.cdf(d, left)
    upper_cells = densities.sf(d, left) - densities.sf(d, right)
    masses = np.where(centers > median, upper_cells, lower_cells)
    return start, np.clip(masses, 0.0, None)


def _lattice_step(scaled: list[Density1D], spacings: list[float], order: float, max_points: int) -> float:
    """Finest part spacing, coarsened until the joint lattice fits in max_points.

    The coarsened step may not exceed the coarsest part spacing.
    """
    step = min(spacings)
    span = math.fsum(upper - lower for lower, upper in (densities.window(part, order) for part in scaled))
    budget = max_points - LATTICE_PADDING * len(scaled)
    if budget > 0 and span / step > budget:
        step = span / budget
    if step > max(spacings):
        raise EpiError(
            ERROR_GRID_COVERAGE,
            f"sum windows span {span:.6g}; {max_points} lattice points cannot resolve every part",
        )
    return step


def scaled_sum_density(
    spec: SumSpec,
    *,
    grid_n: int | None = None,
    allow_closed_form: bool = True,
    max_points: int | None = None,
) -> Density1D:
    if allow_closed_form and all(part.kind == densities.KIND_NORMAL for part in spec.densities):
        return _normal_closed_form(spec)

    grid_n = resolve_grid_n(grid_n)
    if max_points is None:
        max_points = Config.from_env().max_convolution_points
    order = spec.tail_order
    scaled = [densities.scale(part, a, grid_n=grid_n) for part, a in spec.parts]
    spacings = [_spacing(part, order, grid_n) for part in scaled]
    step = _lattice_step(scaled, spacings, order, max_points)

    lattices = [_lattice_masses(part, step, order) for part in scaled]
    total_points = sum(len(masses) for _, masses in lattices) - (len(lattices) - 1)
    if total_points > max_points:
        raise EpiError(
            ERROR_GRID_COVERAGE,
            f"sum needs {total_points} lattice points, more than the limit of {max_points}",
        )

    offset, masses = lattices[0]
    for start, part_masses in lattices[1:]:
        masses = np.clip(fftconvolve(masses, part_masses, mode="full"), 0.0, None)
        offset += start

    xs = (offset + np.arange(len(masses))) * step
    fs = masses / step
    mass = float(trapezoid(fs, xs))
    if abs(mass - 1.0) >= RENORMALIZATION_TOLERANCE:
        raise EpiError(
            ERROR_GRID_COVERAGE,
            f"sum density has mass {mass:.9f} before renormalization; the lattice truncates its tails",
        )
    return densities.grid(xs, fs)
