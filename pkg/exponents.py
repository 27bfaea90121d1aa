from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Iterable, Sequence, Union

import numpy as np
from scipy import special

from errors import (
    ERROR_INCOMPATIBLE_EXPONENTS,
    ERROR_INCONSISTENT_ORDERS,
    ERROR_UNSUPPORTED_INFINITE_ORDER,
    EpiError,
    domain_error,
)

CONJUGATE_TOLERANCE = 1e-12
ORDER_SUM_TOLERANCE = 1e-9
WEIGHT_SUM_TOLERANCE = 1e-9

CONSTANT_RAM_SASON = "RamSasonC"
CONSTANT_BOBKOV_CHISTYAKOV = "BobkovChistyakovC"
CONSTANT_LI_ALPHA = "LiAlpha"
CONSTANT_BOBKOV_MARSIGLIETTI_ALPHA = "BobkovMarsigliettiAlpha"
CONSTANT_GENERAL = "GeneralC"
CONSTANT_LOGCONCAVE = "LogConcaveC"
CONSTANT_LOGCONCAVE_ALPHA = "LogConcaveAlpha"
CONSTANT_LOGCONCAVE_GENERAL = "LogConcaveGeneralC"

CONSTANT_KINDS = frozenset(
    {
        CONSTANT_RAM_SASON,
        CONSTANT_BOBKOV_CHISTYAKOV,
        CONSTANT_LI_ALPHA,
        CONSTANT_BOBKOV_MARSIGLIETTI_ALPHA,
        CONSTANT_GENERAL,
        CONSTANT_LOGCONCAVE,
        CONSTANT_LOGCONCAVE_ALPHA,
        CONSTANT_LOGCONCAVE_GENERAL,
    }
)
LARGE_ORDER_KINDS = frozenset(
    {
        CONSTANT_RAM_SASON,
        CONSTANT_BOBKOV_CHISTYAKOV,
        CONSTANT_LI_ALPHA,
        CONSTANT_BOBKOV_MARSIGLIETTI_ALPHA,
        CONSTANT_GENERAL,
    }
)
LOGCONCAVE_KINDS = frozenset({CONSTANT_LOGCONCAVE, CONSTANT_LOGCONCAVE_ALPHA, CONSTANT_LOGCONCAVE_GENERAL})


def conjugate(p: float) -> float:
    p = float(p)
    if not math.isfinite(p) or p <= 0:
        raise domain_error(f"order must be a positive real, got {p}")
    if p == 1.0:
        raise domain_error("order 1 has no conjugate exponent")
    return p / (p - 1.0)


@dataclass(frozen=True)
class Exponent:
    """A Rényi order p != 1 together with its conjugate p' = p/(p-1)."""

    p: float
    p_prime: float

    def __post_init__(self) -> None:
        if abs(1.0 / self.p + 1.0 / self.p_prime - 1.0) > CONJUGATE_TOLERANCE:
            raise domain_error(f"{self.p_prime} is not the conjugate of {self.p}")

    @classmethod
    def of(cls, p: float) -> "Exponent":
        return cls(p=float(p), p_prime=conjugate(p))

    @classmethod
    def from_conjugate(cls, p_prime: float) -> "Exponent":
        p_prime = float(p_prime)
        if p_prime == 1.0:
            raise EpiError(ERROR_UNSUPPORTED_INFINITE_ORDER, "conjugate 1 corresponds to an infinite order")
        if not math.isfinite(p_prime) or 0.0 <= p_prime < 1.0:
            raise domain_error(f"{p_prime} is not the conjugate of a positive order")
        return cls(p=p_prime / (p_prime - 1.0), p_prime=p_prime)

    @property
    def is_large(self) -> bool:
        return self.p > 1.0

    def __float__(self) -> float:
        return self.p


ExponentLike = Union[Exponent, float, int]


def as_exponent(value: ExponentLike) -> Exponent:
    if isinstance(value, Exponent):
        return value
    return Exponent.of(value)


@dataclass(frozen=True)
class ExponentTriple:
    p: Exponent
    q: Exponent
    r: Exponent
    lam: float


def _triple_from_conjugates(p: Exponent, q: Exponent) -> ExponentTriple:
    if p.p_prime * q.p_prime <= 0:
        raise EpiError(
            ERROR_INCOMPATIBLE_EXPONENTS,
            f"conjugates {p.p_prime} and {q.p_prime} must have the same sign",
        )
    inverse = 1.0 / p.p_prime + 1.0 / q.p_prime
    if abs(inverse - 1.0) < CONJUGATE_TOLERANCE:
        raise EpiError(
            ERROR_UNSUPPORTED_INFINITE_ORDER,
            f"orders {p.p} and {q.p} give r' = 1 (r infinite)",
        )
    if inverse > 1.0:
        raise EpiError(
            ERROR_INCOMPATIBLE_EXPONENTS,
            f"orders {p.p} and {q.p} do not combine into a positive order r",
        )
    r = Exponent.from_conjugate(1.0 / inverse)
    return ExponentTriple(p=p, q=q, r=r, lam=r.p_prime / p.p_prime)


def make_triple(p: ExponentLike, q: ExponentLike) -> ExponentTriple:
    return _triple_from_conjugates(as_exponent(p), as_exponent(q))


def triple_from_lambda(r: ExponentLike, lam: float) -> ExponentTriple:
    r = as_exponent(r)
    if not 0.0 < lam < 1.0:
        raise domain_error(f"lambda must lie in (0,1), got {lam}")
    p = Exponent.from_conjugate(r.p_prime / lam)
    q = Exponent.from_conjugate(r.p_prime / (1.0 - lam))
    return ExponentTriple(p=p, q=q, r=r, lam=float(lam))


@dataclass(frozen=True)
class WeightVector:
    lambdas: tuple[float, ...]
    boundary: bool = False

    @classmethod
    def of(cls, values: Iterable[float]) -> "WeightVector":
        lambdas = tuple(float(value) for value in values)
        if len(lambdas) < 2:
            raise domain_error("a weight vector needs at least two entries")
        if any(not math.isfinite(value) or value < 0 for value in lambdas):
            raise domain_error(f"weights must be nonnegative, got {lambdas}")
        total = math.fsum(lambdas)
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise domain_error(f"weights must sum to 1, got {total}")
        lambdas = tuple(value / total for value in lambdas)
        return cls(lambdas=lambdas, boundary=any(value == 0.0 for value in lambdas))

    @classmethod
    def uniform(cls, m: int) -> "WeightVector":
        _check_m(m)
        return cls(lambdas=tuple(1.0 / m for _ in range(m)), boundary=False)

    @property
    def m(self) -> int:
        return len(self.lambdas)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.lambdas, dtype=float)


def weights_from_orders(r: ExponentLike, orders: Sequence[ExponentLike]) -> WeightVector:
    r = as_exponent(r)
    exponents = [as_exponent(order) for order in orders]
    if len(exponents) < 2:
        raise domain_error("at least two orders are required")
    for index, order in enumerate(exponents):
        if order.p_prime * r.p_prime <= 0:
            raise EpiError(
                ERROR_INCOMPATIBLE_EXPONENTS,
                f"orders[{index}] conjugate {order.p_prime} has a different sign than r' = {r.p_prime}",
            )
    inverse_sum = math.fsum(1.0 / order.p_prime for order in exponents)
    if abs(inverse_sum - 1.0 / r.p_prime) > ORDER_SUM_TOLERANCE:
        raise EpiError(
            ERROR_INCONSISTENT_ORDERS,
            f"sum of 1/r'_i is {inverse_sum}, expected 1/r' = {1.0 / r.p_prime}",
        )
    return WeightVector.of(r.p_prime / order.p_prime for order in exponents)


def entropy_rows(lambdas: np.ndarray) -> np.ndarray:
    return np.sum(special.entr(lambdas), axis=-1)


def big_A_rows(r_prime: float, lambdas: np.ndarray) -> np.ndarray:
    # 1 - lambda/r' stays positive for both signs of r' since lambda <= 1 < r' or r' < 0
    shifted = 1.0 - lambdas / r_prime
    total = 1.0 - 1.0 / r_prime
    inner = np.sum(special.xlogy(shifted, shifted), axis=-1) - total * math.log(total)
    return abs(r_prime) * inner


def discrete_entropy(w: WeightVector) -> float:
    return float(entropy_rows(w.as_array()))


def big_A(r: ExponentLike, w: WeightVector) -> float:
    r = as_exponent(r)
    return float(big_A_rows(r.p_prime, w.as_array()))


def uniform_ratio(r: ExponentLike, m: int) -> float:
    """A/H at the uniform weight; negative and increasing toward 0 as m grows."""
    _check_m(m)
    return big_A(r, WeightVector.uniform(m)) / math.log(m)


def _check_m(m: int) -> None:
    if isinstance(m, bool) or int(m) != m or m < 2:
        raise domain_error(f"m must be an integer >= 2, got {m}")


def _large_order(r: ExponentLike) -> Exponent:
    r = as_exponent(r)
    if r.p <= 1.0:
        raise domain_error(f"this constant needs r > 1, got {r.p}")
    return r


def _small_order(r: ExponentLike) -> Exponent:
    r = as_exponent(r)
    if r.p >= 1.0:
        raise domain_error(f"the log-concave constants need 0 < r < 1, got {r.p}")
    return r


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise domain_error(f"alpha must lie in (0, 1], got {alpha}")
    return alpha


def constant_ram_sason(r: ExponentLike, m: int) -> float:
    r = _large_order(r)
    _check_m(m)
    rp = r.p_prime
    return r.p ** (rp / r.p) * (1.0 - 1.0 / (m * rp)) ** (m * rp - 1.0)


def constant_bobkov_chistyakov(r: ExponentLike) -> float:
    r = _large_order(r)
    return r.p ** (r.p_prime / r.p) / math.e


def alpha_li(r: ExponentLike) -> float:
    r = _large_order(r)
    rp = r.p_prime
    denominator = 1.0 + rp * math.log2(r.p) / r.p + (2.0 * rp - 1.0) * math.log2(1.0 - 1.0 / (2.0 * rp))
    return 1.0 / denominator


def alpha_li_two_variable(r: ExponentLike) -> float:
    r = _large_order(r)
    value = r.p
    return (value - 1.0) / ((value + 1.0) * math.log2(value + 1.0) - value * math.log2(value) - 2.0)


def alpha_bobkov_marsiglietti(r: ExponentLike) -> float:
    r = _large_order(r)
    return (r.p + 1.0) / 2.0


def constant_general(r: ExponentLike, m: int, alpha: float) -> float:
    # alpha = 1 is accepted and gives back the Ram-Sason constant
    alpha = _check_alpha(alpha)
    return (m * constant_ram_sason(r, m)) ** alpha / m


def constant_logconcave(r: ExponentLike, m: int) -> float:
    r = _small_order(r)
    _check_m(m)
    rp = r.p_prime
    return r.p ** (-rp / r.p) * (1.0 - 1.0 / (m * rp)) ** (1.0 - m * rp)


def alpha_logconcave(r: ExponentLike) -> float:
    r = _small_order(r)
    rp = abs(r.p_prime)
    denominator = 1.0 + rp * math.log2(r.p) / r.p + (2.0 * rp + 1.0) * math.log2(1.0 + 1.0 / (2.0 * rp))
    return 1.0 / denominator


def alpha_logconcave_two_variable(r: ExponentLike) -> float:
    r = _small_order(r)
    value = r.p
    return (1.0 - value) / (
        (value + 1.0) * math.log2(value + 1.0) - value * math.log2(value) - 2.0 * value
    )


def constant_logconcave_general(r: ExponentLike, m: int, alpha: float) -> float:
    alpha = _check_alpha(alpha)
    return (m * constant_logconcave(r, m)) ** alpha / m


@dataclass(frozen=True)
class EpiConstant:
    r: Exponent
    m: int
    kind: str
    value: float
    alpha_input: float | None = None


def epi_constant(kind: str, r: ExponentLike, m: int = 2, alpha: float | None = None) -> EpiConstant:
    if kind not in CONSTANT_KINDS:
        raise domain_error(f"unknown constant kind {kind!r}")
    r = as_exponent(r)
    _check_m(m)
    needs_alpha = kind in (CONSTANT_GENERAL, CONSTANT_LOGCONCAVE_GENERAL)
    if needs_alpha and alpha is None:
        raise domain_error(f"{kind} needs an alpha")
    if kind == CONSTANT_RAM_SASON:
        value = constant_ram_sason(r, m)
    elif kind == CONSTANT_BOBKOV_CHISTYAKOV:
        value = constant_bobkov_chistyakov(r)
    elif kind == CONSTANT_LI_ALPHA:
        value = alpha_li(r) if m > 2 else alpha_li_two_variable(r)
    elif kind == CONSTANT_BOBKOV_MARSIGLIETTI_ALPHA:
        value = alpha_bobkov_marsiglietti(r)
    elif kind == CONSTANT_GENERAL:
        value = constant_general(r, m, alpha)
    elif kind == CONSTANT_LOGCONCAVE:
        value = constant_logconcave(r, m)
    elif kind == CONSTANT_LOGCONCAVE_ALPHA:
        value = alpha_logconcave(r) if m > 2 else alpha_logconcave_two_variable(r)
    else:
        value = constant_logconcave_general(r, m, alpha)
    return EpiConstant(
        r=r,
        m=int(m),
        kind=kind,
        value=value,
        alpha_input=float(alpha) if needs_alpha else None,
    )


def logconcave_constants(
    r: ExponentLike,
    m: int,
    alpha: float | None = None,
    kind: str | None = None,
) -> EpiConstant:
    if kind is None:
        kind = CONSTANT_LOGCONCAVE if alpha is None else CONSTANT_LOGCONCAVE_GENERAL
    if kind not in LOGCONCAVE_KINDS:
        raise domain_error(f"{kind!r} is not a log-concave constant kind")
    _small_order(r)
    return epi_constant(kind, r, m, alpha)


def constant_rows(orders: Sequence[ExponentLike], ms: Sequence[int], alpha: float = 0.5) -> list[dict[str, object]]:
    """Every constant defined at (r, m): the r > 1 family or the log-concave r < 1 family."""
    rows: list[dict[str, object]] = []
    for order in orders:
        r = as_exponent(order)
        kinds = sorted(LARGE_ORDER_KINDS if r.is_large else LOGCONCAVE_KINDS)
        for m in ms:
            for kind in kinds:
                constant = epi_constant(kind, r, m, alpha)
                rows.append(
                    {
                        "r": r.p,
                        "m": constant.m,
                        "kind": constant.kind,
                        "value": constant.value,
                        "alpha": constant.alpha_input,
                    }
                )
    return rows
