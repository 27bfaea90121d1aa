from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
import math
from typing import Callable

import numpy as np

from config import DEFAULT_SEED
from errors import domain_error
from exponents import (
    ExponentLike,
    WeightVector,
    as_exponent,
    big_A_rows,
    entropy_rows,
)
from report_exporter import KIND_OPTIMIZER, EpiReport, make_accuracy_report, make_report

METHOD_GRID_SCAN = "GridScan"
METHOD_LOCAL_REFINE = "LocalRefine"

OBJECTIVE_A = "A"
OBJECTIVE_A_OVER_H = "A/H"
OBJECTIVE_MIXED = "mixed"

LATTICE_DIVISIONS = 200
SUPPORTED_M = (2, 3, 4)
TIE_TOLERANCE = 1e-12
GOLDEN_ITERATIONS = 50
MAX_SWEEPS = 40
SANITY_SAMPLES = 1000
SANITY_TOLERANCE = 1e-9

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

Objective = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SimplexSearchResult:
    argmin: WeightVector
    value: float
    method: str
    resolution: float
    objective: str
    r: float
    m: int
    alpha: float | None = None


@lru_cache(maxsize=8)
def simplex_lattice(m: int, divisions: int = LATTICE_DIVISIONS) -> np.ndarray:
    """All compositions of `divisions` into m nonnegative parts, in lexicographic order."""
    if m == 1:
        return np.array([[divisions]], dtype=np.int64)
    blocks = []
    for first in range(divisions + 1):
        rest = simplex_lattice(m - 1, divisions - first)
        blocks.append(np.column_stack([np.full(len(rest), first, dtype=np.int64), rest]))
    return np.vstack(blocks)


def _check_m(m: int) -> None:
    if m not in SUPPORTED_M:
        raise domain_error(f"the simplex search supports m in {SUPPORTED_M}, got {m}")


def _objective_a(r_prime: float) -> Objective:
    return lambda lambdas: big_A_rows(r_prime, lambdas)


def _objective_ratio(r_prime: float) -> Objective:
    def ratio(lambdas: np.ndarray) -> np.ndarray:
        entropy = entropy_rows(lambdas)
        with np.errstate(divide="ignore", invalid="ignore"):
            values = big_A_rows(r_prime, lambdas) / entropy
        return np.where(entropy > 0, values, np.inf)

    return ratio


def _objective_mixed(r_prime: float, alpha: float) -> Objective:
    return lambda lambdas: alpha * big_A_rows(r_prime, lambdas) - (1.0 - alpha) * entropy_rows(lambdas)


def _evaluate(objective: Objective, point: np.ndarray) -> float:
    return float(objective(point[None, :])[0])


def _golden_section(line: Callable[[float], float], lower: float, upper: float) -> float:
    a, b = lower, upper
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = line(c), line(d)
    for _ in range(GOLDEN_ITERATIONS):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = line(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = line(d)
    return 0.5 * (a + b)


def _refine(objective: Objective, start: np.ndarray, resolution: float) -> np.ndarray:
    """Pairwise mass transfers between support coordinates, each a golden-section line search."""
    point = start.copy()
    best = _evaluate(objective, point)
    support = [int(index) for index in np.flatnonzero(point > 0)]
    for _ in range(MAX_SWEEPS):
        improved = False
        for i, j in combinations(support, 2):
            pair_total = point[i] + point[j]
            lower = max(0.0, point[i] - resolution)
            upper = min(pair_total, point[i] + resolution)

            def line(value: float, i: int = i, j: int = j, pair_total: float = pair_total) -> float:
                trial = point.copy()
                trial[i], trial[j] = value, pair_total - value
                return _evaluate(objective, trial)

            value = _golden_section(line, lower, upper)
            candidate = line(value)
            if candidate < best - 1e-15:
                point[i], point[j] = value, pair_total - value
                best = candidate
                improved = True
        if not improved:
            break
    return point


def _search(
    objective: Objective,
    m: int,
    *,
    name: str,
    r: float,
    alpha: float | None = None,
    exclude_vertices: bool = False,
) -> SimplexSearchResult:
    counts = simplex_lattice(m)
    if exclude_vertices:
        counts = counts[counts.max(axis=1) < LATTICE_DIVISIONS]
    lambdas = counts / LATTICE_DIVISIONS
    values = objective(lambdas)
    lowest = float(np.min(values))
    # lattice rows are lexicographic, so the first near-minimum is the smallest tie
    index = int(np.flatnonzero(values <= lowest + TIE_TOLERANCE)[0])
    start = lambdas[index]

    refined = _refine(objective, start, 1.0 / LATTICE_DIVISIONS)
    argmin = WeightVector.of(refined)
    value = _evaluate(objective, argmin.as_array())
    method = METHOD_LOCAL_REFINE if value < lowest - TIE_TOLERANCE else METHOD_GRID_SCAN
    if method == METHOD_GRID_SCAN:
        argmin = WeightVector.of(start)
        value = _evaluate(objective, argmin.as_array())
    return SimplexSearchResult(
        argmin=argmin,
        value=value,
        method=method,
        resolution=1.0 / LATTICE_DIVISIONS,
        objective=name,
        r=r,
        m=m,
        alpha=alpha,
    )


def minimize_A(r: ExponentLike, m: int) -> SimplexSearchResult:
    r = as_exponent(r)
    _check_m(m)
    return _search(_objective_a(r.p_prime), m, name=OBJECTIVE_A, r=r.p)


def minimize_A_over_H(r: ExponentLike, m: int) -> SimplexSearchResult:
    r = as_exponent(r)
    _check_m(m)
    return _search(_objective_ratio(r.p_prime), m, name=OBJECTIVE_A_OVER_H, r=r.p, exclude_vertices=True)


def minimize_mixed(r: ExponentLike, m: int, alpha: float) -> SimplexSearchResult:
    r = as_exponent(r)
    _check_m(m)
    if not 0.0 < alpha <= 1.0:
        raise domain_error(f"alpha must lie in (0, 1], got {alpha}")
    return _search(_objective_mixed(r.p_prime, alpha), m, name=OBJECTIVE_MIXED, r=r.p, alpha=alpha)


def objective_for(result: SimplexSearchResult) -> Objective:
    r_prime = as_exponent(result.r).p_prime
    if result.objective == OBJECTIVE_A:
        return _objective_a(r_prime)
    if result.objective == OBJECTIVE_A_OVER_H:
        return _objective_ratio(r_prime)
    return _objective_mixed(r_prime, result.alpha)


def random_minimum(result: SimplexSearchResult, *, samples: int = SANITY_SAMPLES, seed: int = DEFAULT_SEED) -> float:
    """Smallest objective value over Dirichlet(1) samples of the simplex."""
    rng = np.random.default_rng(seed)
    points = rng.dirichlet(np.ones(result.m), size=samples)
    return float(np.min(objective_for(result)(points)))


def sanity_check(result: SimplexSearchResult, *, samples: int = SANITY_SAMPLES, seed: int = DEFAULT_SEED) -> EpiReport:
    sampled = random_minimum(result, samples=samples, seed=seed)
    return make_report(
        KIND_OPTIMIZER,
        sampled,
        result.value,
        tolerance=SANITY_TOLERANCE,
        inputs={"check": "random_minimum", "objective": result.objective, "r": result.r, "m": result.m, "alpha": result.alpha},
        r=result.r,
        m=result.m,
        alpha=result.alpha,
        details={"samples": samples, "seed": seed, "argmin": list(result.argmin.lambdas)},
    )


def closed_form_check(result: SimplexSearchResult, reference: float, bound: float, *, label: str) -> EpiReport:
    return make_accuracy_report(
        KIND_OPTIMIZER,
        abs(result.value - reference),
        bound,
        inputs={"check": label, "objective": result.objective, "r": result.r, "m": result.m, "alpha": result.alpha},
        r=result.r,
        m=result.m,
        alpha=result.alpha,
        details={
            "value": result.value,
            "reference": reference,
            "argmin": list(result.argmin.lambdas),
            "method": result.method,
            "resolution": result.resolution,
        },
    )
