from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Callable, Iterable

import numpy as np
from scipy.integrate import simpson

from config import Config, MIN_GRID_N, is_valid_grid_n
from errors import ERROR_USAGE, EpiError

MIN_PIECE_INTERVALS = 64
# endpoints are sampled this fraction of a cell inside the piece (one-sided limits at kinks)
ENDPOINT_NUDGE = 1e-7

Integrand = Callable[[np.ndarray], np.ndarray]


def resolve_grid_n(grid_n: int | None = None) -> int:
    if grid_n is None:
        grid_n = Config.from_env().grid_n
    if not is_valid_grid_n(grid_n):
        raise EpiError(ERROR_USAGE, f"grid size must be a power of two >= {MIN_GRID_N}, got {grid_n}")
    return grid_n


@dataclass(frozen=True)
class QuadratureGrid:
    """Union of uniform pieces; Simpson on each piece, pieces split where integrands have kinks."""

    pieces: tuple[np.ndarray, ...]
    nudge: bool = True

    @property
    def nodes(self) -> np.ndarray:
        return np.concatenate(self.pieces)

    @property
    def lower(self) -> float:
        return float(self.pieces[0][0])

    @property
    def upper(self) -> float:
        return float(self.pieces[-1][-1])

    def evaluation_points(self) -> list[np.ndarray]:
        if not self.nudge:
            return list(self.pieces)
        points = []
        for xs in self.pieces:
            shifted = xs.copy()
            step = xs[1] - xs[0]
            shifted[0] += ENDPOINT_NUDGE * step
            shifted[-1] -= ENDPOINT_NUDGE * step
            points.append(shifted)
        return points

    def sample(self, integrand: Integrand) -> list[np.ndarray]:
        return [np.asarray(integrand(points), dtype=float) for points in self.evaluation_points()]

    def integrate_samples(self, samples: list[np.ndarray], *, halved: bool = False) -> float:
        total = 0.0
        for xs, ys in zip(self.pieces, samples):
            if halved:
                index = _halving_index(len(xs))
                xs, ys = xs[index], ys[index]
            total += float(simpson(ys, x=xs))
        return total

    def integrate(self, integrand: Integrand) -> float:
        return self.integrate_samples(self.sample(integrand))

    def integrate_with_halving(self, integrand: Integrand) -> tuple[float, float]:
        samples = self.sample(integrand)
        return self.integrate_samples(samples), self.integrate_samples(samples, halved=True)


def _halving_index(count: int) -> np.ndarray:
    index = np.arange(0, count, 2)
    if index[-1] != count - 1:
        index = np.append(index, count - 1)
    return index


def node_grid(xs: np.ndarray) -> QuadratureGrid:
    return QuadratureGrid(pieces=(np.asarray(xs, dtype=float),), nudge=False)


def piecewise_grid(lower: float, upper: float, breakpoints: Iterable[float], grid_n: int) -> QuadratureGrid:
    if not (math.isfinite(lower) and math.isfinite(upper)) or upper <= lower:
        raise ValueError(f"invalid quadrature window [{lower}, {upper}]")
    width = upper - lower
    edges = [lower]
    for point in sorted(set(float(value) for value in breakpoints)):
        if lower < point < upper and point - edges[-1] > 1e-12 * width:
            edges.append(point)
    if upper - edges[-1] <= 1e-12 * width:
        edges.pop()
    edges.append(upper)

    pieces = []
    for left, right in zip(edges[:-1], edges[1:]):
        share = grid_n * (right - left) / width
        intervals = max(MIN_PIECE_INTERVALS, 2 ** math.ceil(math.log2(max(share, 1.0))))
        pieces.append(np.linspace(left, right, intervals + 1))
    return QuadratureGrid(pieces=tuple(pieces))


def relative_change(value: float, reference: float) -> float:
    scale = max(abs(reference), 1e-300)
    return abs(value - reference) / scale
