from __future__ import annotations

import math
from typing import Sequence

from convolution import scaled_sum_density, sqrt_lambda_spec, sum_spec
import densities
from densities import Density1D
from density_specs import density_label
from entropy import entropy_power, renyi_entropy
from errors import ERROR_PRECONDITION, EpiError, domain_error
from exponents import (
    Exponent,
    ExponentLike,
    ExponentTriple,
    WeightVector,
    as_exponent,
    discrete_entropy,
    weights_from_orders,
)
from report_exporter import (
    KIND_ALPHA_FORM,
    KIND_C_FORM,
    KIND_CHARACT_RHS,
    KIND_DCT,
    KIND_DCT_M,
    KIND_GENERAL_FORM,
    KIND_INFO_INEQ,
    EpiReport,
    make_report,
)

TOLERANCE_POWER = 1e-6
TOLERANCE_NATS = 1e-4
TOLERANCE_INFO = 1e-6
RECIPE_TOLERANCE = 1e-9

FORM_KINDS = frozenset({KIND_C_FORM, KIND_ALPHA_FORM, KIND_GENERAL_FORM})


def info_inequality_gap(
    f: Density1D,
    phi: Density1D,
    p: ExponentLike,
    *,
    tolerance: float = TOLERANCE_INFO,
    grid_n: int | None = None,
) -> EpiReport:
    """h_p(X) <= -p' log E[phi^(1/p')(X)]; equality when phi is the escort f_p."""
    p = as_exponent(p)
    expectation = densities.power_expectation(f, phi, 1.0 / p.p_prime, p.p, grid_n=grid_n)
    bound = -p.p_prime * math.log(expectation)
    h_p = renyi_entropy(f, p, grid_n=grid_n)
    return make_report(
        KIND_INFO_INEQ,
        bound,
        h_p.nats,
        tolerance=tolerance,
        inputs={"f": f, "phi": phi, "p": p.p},
        r=p.p,
        warnings=h_p.warnings,
    )


def dct_constant(r: ExponentLike, orders: Sequence[ExponentLike], n: int = 1) -> float:
    """(n/2) r' (log r / r - sum_i log r_i / r_i)."""
    r = as_exponent(r)
    spread = math.fsum(math.log(order.p) / order.p for order in map(as_exponent, orders))
    return 0.5 * n * r.p_prime * (math.log(r.p) / r.p - spread)


def _weighted_entropy_sum(
    parts: Sequence[Density1D],
    w: WeightVector,
    orders: Sequence[Exponent],
    grid_n: int | None,
) -> tuple[float, list[str]]:
    total = 0.0
    warnings: list[str] = []
    for part, lam, order in zip(parts, w.lambdas, orders):
        value = renyi_entropy(part, order, grid_n=grid_n)
        total += lam * value.nats
        warnings.extend(value.warnings)
    return total, warnings


def dct_gap(
    fx: Density1D,
    fy: Density1D,
    triple: ExponentTriple,
    *,
    tolerance: float = TOLERANCE_NATS,
    grid_n: int | None = None,
) -> EpiReport:
    w = WeightVector.of([triple.lam, 1.0 - triple.lam])
    total = scaled_sum_density(sqrt_lambda_spec([fx, fy], w, tail_order=triple.r.p), grid_n=grid_n)
    h_sum = renyi_entropy(total, triple.r, grid_n=grid_n)
    weighted, warnings = _weighted_entropy_sum([fx, fy], w, [triple.p, triple.q], grid_n)
    constant = dct_constant(triple.r, [triple.p, triple.q])
    return make_report(
        KIND_DCT,
        h_sum.nats - weighted,
        constant,
        tolerance=tolerance,
        inputs={"fx": fx, "fy": fy, "triple": triple},
        r=triple.r.p,
        m=2,
        details={"p": triple.p.p, "q": triple.q.p, "lambda": triple.lam},
        warnings=list(h_sum.warnings) + warnings,
    )


def dct_gap_m(
    parts: Sequence[Density1D],
    r: ExponentLike,
    orders: Sequence[ExponentLike],
    *,
    tolerance: float = TOLERANCE_NATS,
    grid_n: int | None = None,
) -> EpiReport:
    if len(parts) != len(orders):
        raise domain_error(f"{len(parts)} parts need {len(parts)} orders, got {len(orders)}")
    r = as_exponent(r)
    exponents = [as_exponent(order) for order in orders]
    w = weights_from_orders(r, exponents)
    total = scaled_sum_density(sqrt_lambda_spec(parts, w, tail_order=r.p), grid_n=grid_n)
    h_sum = renyi_entropy(total, r, grid_n=grid_n)
    weighted, warnings = _weighted_entropy_sum(parts, w, exponents, grid_n)
    return make_report(
        KIND_DCT_M,
        h_sum.nats - weighted,
        dct_constant(r, exponents),
        tolerance=tolerance,
        inputs={"parts": list(parts), "r": r.p, "orders": [order.p for order in exponents]},
        r=r.p,
        m=len(parts),
        details={"lambdas": list(w.lambdas)},
        warnings=list(h_sum.warnings) + warnings,
    )


def charact_rhs(c: float, alpha: float, w: WeightVector, n: int = 1) -> float:
    """(n/2)(log c / alpha + (1/alpha - 1) H(lambda))."""
    if not c > 0 or not alpha > 0:
        raise domain_error(f"c and alpha must be positive, got c={c}, alpha={alpha}")
    return 0.5 * n * (math.log(c) / alpha + (1.0 / alpha - 1.0) * discrete_entropy(w))


def _form_kind(c: float, alpha: float) -> str:
    if alpha == 1.0:
        return KIND_C_FORM
    if c == 1.0:
        return KIND_ALPHA_FORM
    return KIND_GENERAL_FORM


def _require_log_concave(parts: Sequence[Density1D]) -> None:
    for index, part in enumerate(parts):
        if not densities.is_log_concave(part):
            raise EpiError(
                ERROR_PRECONDITION,
                f"parts[{index}] ({density_label(part)}) is not log-concave; the r < 1 constants do not apply",
            )


def epi_form_check(
    parts: Sequence[Density1D],
    r: ExponentLike,
    c: float,
    alpha: float,
    *,
    kind: str | None = None,
    require_log_concave: bool | None = None,
    tolerance: float = TOLERANCE_POWER,
    grid_n: int | None = None,
) -> EpiReport:
    """N_r^alpha(X_1 + ... + X_m) >= c * sum_i N_r^alpha(X_i) for the unscaled sum."""
    r = as_exponent(r)
    if len(parts) < 2:
        raise domain_error("an entropy power inequality needs at least two parts")
    if not c > 0 or not alpha > 0:
        raise domain_error(f"c and alpha must be positive, got c={c}, alpha={alpha}")
    kind = kind or _form_kind(c, alpha)
    if kind not in FORM_KINDS:
        raise domain_error(f"{kind!r} is not an entropy power form")
    if require_log_concave is None:
        require_log_concave = r.p < 1.0
    if require_log_concave:
        _require_log_concave(parts)

    total = scaled_sum_density(sum_spec(parts, tail_order=r.p), grid_n=grid_n)
    lhs = entropy_power(total, r, grid_n=grid_n) ** alpha
    powers = [entropy_power(part, r, grid_n=grid_n) ** alpha for part in parts]
    rhs = c * math.fsum(powers)
    return make_report(
        kind,
        lhs,
        rhs,
        tolerance=tolerance * rhs,
        inputs={"parts": list(parts), "r": r.p, "c": c, "alpha": alpha},
        r=r.p,
        m=len(parts),
        alpha=alpha,
        c=c,
        details={"relative_tolerance": tolerance, "ratio": lhs / rhs},
    )


def recipe_weights(parts: Sequence[Density1D], r: ExponentLike, alpha: float, *, grid_n: int | None = None) -> WeightVector:
    """lambda_i = N_r^alpha(X_i) / sum_j N_r^alpha(X_j)."""
    powers = [entropy_power(part, r, grid_n=grid_n) ** alpha for part in parts]
    total = math.fsum(powers)
    return WeightVector.of(value / total for value in powers)


def characterization_check(
    parts: Sequence[Density1D],
    r: ExponentLike,
    c: float,
    alpha: float,
    w: WeightVector,
    *,
    tolerance: float = TOLERANCE_NATS,
    grid_n: int | None = None,
) -> EpiReport:
    """h_r(sum sqrt(lambda_i) X_i) - sum lambda_i h_r(X_i) >= charact_rhs(c, alpha, lambda)."""
    r = as_exponent(r)
    total = scaled_sum_density(sqrt_lambda_spec(parts, w, tail_order=r.p), grid_n=grid_n)
    h_sum = renyi_entropy(total, r, grid_n=grid_n)
    weighted, warnings = _weighted_entropy_sum(parts, w, [r] * len(parts), grid_n)
    return make_report(
        KIND_CHARACT_RHS,
        h_sum.nats - weighted,
        charact_rhs(c, alpha, w),
        tolerance=tolerance,
        inputs={"parts": list(parts), "r": r.p, "c": c, "alpha": alpha, "weights": w},
        r=r.p,
        m=len(parts),
        alpha=alpha,
        c=c,
        details={"lambdas": list(w.lambdas)},
        warnings=list(h_sum.warnings) + warnings,
    )


def equivalence_check(
    parts: Sequence[Density1D],
    r: ExponentLike,
    c: float,
    alpha: float,
    w: WeightVector | None = None,
    *,
    grid_n: int | None = None,
) -> EpiReport:
    """Characterization at the power-proportional weights against the entropy power form.

    The characterization is applied to Y_i = X_i / sqrt(lambda_i), whose
    sqrt(lambda)-weighted sum is the plain sum of the X_i. At the recipe
    weights a nonnegative characterization gap must give a form gap >= -1e-6
    (relative); details["consistent"] records whether it does.
    """
    r = as_exponent(r)
    recipe = recipe_weights(parts, r, alpha, grid_n=grid_n)
    weights = w or recipe
    is_recipe = all(abs(a - b) <= RECIPE_TOLERANCE for a, b in zip(weights.lambdas, recipe.lambdas))
    rescaled = [densities.scale(part, 1.0 / math.sqrt(lam), grid_n=grid_n) for part, lam in zip(parts, weights.lambdas)]

    characterization = characterization_check(rescaled, r, c, alpha, weights, grid_n=grid_n)
    form = epi_form_check(parts, r, c, alpha, require_log_concave=False, grid_n=grid_n)
    form_relative_gap = form.gap / form.rhs
    consistent: bool | None = None
    warnings = list(characterization.warnings)
    if is_recipe:
        consistent = characterization.gap < 0 or form_relative_gap >= -TOLERANCE_POWER
        if not consistent:
            warnings.append("sign inconsistency: characterization holds but the entropy power form fails")
    else:
        warnings.append("weights differ from the power-proportional recipe; consistency not asserted")
    return make_report(
        KIND_CHARACT_RHS,
        characterization.lhs,
        characterization.rhs,
        tolerance=TOLERANCE_NATS,
        inputs={"equivalence": True, "parts": list(parts), "r": r.p, "c": c, "alpha": alpha, "weights": weights},
        r=r.p,
        m=len(parts),
        alpha=alpha,
        c=c,
        details={
            "lambdas": list(weights.lambdas),
            "recipe_lambdas": list(recipe.lambdas),
            "characterization_gap": characterization.gap,
            "form_gap": form.gap,
            "form_relative_gap": form_relative_gap,
            "consistent": consistent,
        },
        warnings=warnings,
    )
