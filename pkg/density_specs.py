from __future__ import annotations

import hashlib
import json
import math
from typing import Any

import numpy as np

import densities
from densities import Density1D
from errors import ERROR_USAGE, EpiError
from exponents import Exponent, ExponentTriple, WeightVector

KIND_MIXTURE = "mixture"
SPEC_KINDS = frozenset(densities.DENSITY_KINDS | {KIND_MIXTURE})


def _coerce_float(value: Any, field_name: str) -> float:
    if isinstance(value, bool):
        raise ValueError(f"{field_name} must be a number")
    try:
        number = float(value)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{field_name} must be a number") from exc
    if not math.isfinite(number):
        raise ValueError(f"{field_name} must be finite")
    return number


def _coerce_positive(value: Any, field_name: str) -> float:
    number = _coerce_float(value, field_name)
    if number <= 0:
        raise ValueError(f"{field_name} must be greater than 0")
    return number


def _coerce_int(value: Any, field_name: str) -> int:
    if isinstance(value, bool):
        raise ValueError(f"{field_name} must be an integer")
    try:
        number = int(value)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{field_name} must be an integer") from exc
    if number != value and not isinstance(value, str):
        raise ValueError(f"{field_name} must be an integer")
    return number


def _coerce_list(value: Any, field_name: str) -> list[float]:
    if not isinstance(value, list) or not value:
        raise ValueError(f"{field_name} must be a non-empty array")
    return [_coerce_float(item, f"{field_name}[{index}]") for index, item in enumerate(value)]


def normalize_density_spec(payload: Any) -> dict[str, Any]:
    if not isinstance(payload, dict):
        raise ValueError("Density spec must be an object")
    kind = str(payload.get("kind") or "").strip().lower()
    if kind not in SPEC_KINDS:
        raise ValueError(f"kind must be one of {', '.join(sorted(SPEC_KINDS))}")

    if kind == densities.KIND_NORMAL:
        return {
            "kind": kind,
            "sigma2": _coerce_positive(payload.get("sigma2", 1.0), "sigma2"),
            "mean": _coerce_float(payload.get("mean", 0.0), "mean"),
        }
    if kind == densities.KIND_UNIFORM:
        a = _coerce_float(payload.get("a", 0.0), "a")
        b = _coerce_float(payload.get("b", 1.0), "b")
        if b <= a:
            raise ValueError("b must be greater than a")
        return {"kind": kind, "a": a, "b": b}
    if kind == densities.KIND_EXPONENTIAL:
        return {"kind": kind, "rate": _coerce_positive(payload.get("rate", 1.0), "rate")}
    if kind == densities.KIND_LAPLACE:
        return {
            "kind": kind,
            "scale": _coerce_positive(payload.get("scale", 1.0), "scale"),
            "loc": _coerce_float(payload.get("loc", 0.0), "loc"),
        }
    if kind == KIND_MIXTURE:
        means = _coerce_list(payload.get("means"), "means")
        normalized: dict[str, Any] = {
            "kind": kind,
            "means": means,
            "sigma2": _coerce_positive(payload.get("sigma2", 1.0), "sigma2"),
        }
        if payload.get("weights") is not None:
            weights = _coerce_list(payload.get("weights"), "weights")
            if len(weights) != len(means):
                raise ValueError("weights must have one entry per mean")
            if any(weight <= 0 for weight in weights):
                raise ValueError("weights must be greater than 0")
            normalized["weights"] = weights
        return normalized

    xs_min = _coerce_float(payload.get("xs_min"), "xs_min")
    xs_max = _coerce_float(payload.get("xs_max"), "xs_max")
    if xs_max <= xs_min:
        raise ValueError("xs_max must be greater than xs_min")
    fs = _coerce_list(payload.get("fs"), "fs")
    if any(value < 0 for value in fs):
        raise ValueError("fs must be nonnegative")
    n = _coerce_int(payload.get("n", len(fs)), "n")
    if n != len(fs):
        raise ValueError(f"n is {n} but fs has {len(fs)} values")
    if n < 3:
        raise ValueError("n must be at least 3")
    return {"kind": kind, "xs_min": xs_min, "xs_max": xs_max, "n": n, "fs": fs}


def density_from_spec(payload: Any, *, grid_n: int | None = None) -> Density1D:
    spec = normalize_density_spec(payload)
    kind = spec["kind"]
    if kind == densities.KIND_NORMAL:
        return densities.normal(spec["sigma2"], spec["mean"])
    if kind == densities.KIND_UNIFORM:
        return densities.uniform(spec["a"], spec["b"])
    if kind == densities.KIND_EXPONENTIAL:
        return densities.exponential(spec["rate"])
    if kind == densities.KIND_LAPLACE:
        return densities.laplace(spec["scale"], spec["loc"])
    if kind == KIND_MIXTURE:
        return densities.normal_mixture(spec["means"], spec["sigma2"], spec.get("weights"), grid_n=grid_n)
    return densities.grid_from_range(spec["xs_min"], spec["xs_max"], spec["fs"])


def density_to_spec(d: Density1D) -> dict[str, Any]:
    if d.is_grid:
        return {
            "kind": densities.KIND_GRID,
            "xs_min": float(d.xs[0]),
            "xs_max": float(d.xs[-1]),
            "n": int(len(d.xs)),
            "fs": [float(value) for value in d.fs],
        }
    return {"kind": d.kind, **{key: float(value) for key, value in d.params.items()}}


def density_label(d: Density1D) -> str:
    if d.is_grid:
        return f"grid[{d.xs[0]:.4g},{d.xs[-1]:.4g}]x{len(d.xs)}"
    inner = ",".join(f"{key}={value:.6g}" for key, value in d.params.items())
    return f"{d.kind}({inner})"


def parse_density_argument(text: str, *, grid_n: int | None = None) -> Density1D:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise EpiError(ERROR_USAGE, f"density spec is not valid JSON: {exc.msg}") from exc
    try:
        return density_from_spec(payload, grid_n=grid_n)
    except ValueError as exc:
        raise EpiError(ERROR_USAGE, f"invalid density spec: {exc}") from exc


def describe_value(value: Any) -> Any:
    """Compact, digest-friendly description of library values."""
    if isinstance(value, Density1D):
        if value.is_grid:
            digest = hashlib.sha256(np.ascontiguousarray(value.fs).tobytes()).hexdigest()[:16]
            return {
                "kind": densities.KIND_GRID,
                "xs_min": float(value.xs[0]),
                "xs_max": float(value.xs[-1]),
                "n": int(len(value.xs)),
                "fs_sha256": digest,
            }
        return density_to_spec(value)
    if isinstance(value, Exponent):
        return value.p
    if isinstance(value, WeightVector):
        return list(value.lambdas)
    if isinstance(value, ExponentTriple):
        return {"p": value.p.p, "q": value.q.p, "r": value.r.p, "lambda": value.lam}
    return str(value)
