from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
import math
import sys
from typing import Callable

import densities
from densities import Density1D
from density_specs import density_label
import entropy
from errors import ERROR_USAGE, EpiError
import epi_verify
import exponents
from exponents import Exponent, triple_from_lambda
import optimizer
from report_exporter import (
    KIND_ENTROPY_ORACLE,
    KIND_INFO_INEQ,
    KIND_VARENTROPY,
    EpiReport,
    make_accuracy_report,
    report_failed,
    sort_reports,
)
import transport

DEFAULT_SUITE_ID = "default"

ORACLE_TOLERANCE = 1e-6
FLATNESS_TOLERANCE = 1e-8


@dataclass(frozen=True)
class SuiteSettings:
    grid_n: int
    tolerance_power: float = epi_verify.TOLERANCE_POWER
    tolerance_nats: float = epi_verify.TOLERANCE_NATS
    tolerance_info: float = epi_verify.TOLERANCE_INFO
    seed: int = optimizer.DEFAULT_SEED


@dataclass(frozen=True)
class CheckTask:
    name: str
    run: Callable[[], list[EpiReport]]


@dataclass(frozen=True)
class VerificationSuite:
    id: str
    label: str
    description: str
    build_tasks: Callable[[SuiteSettings], list[CheckTask]]


@dataclass
class SuiteOutcome:
    reports: list[EpiReport] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def failed(self) -> int:
        return sum(1 for report in self.reports if report_failed(report)) + len(self.errors)


def density_suite() -> list[Density1D]:
    return [
        densities.normal(1.0),
        densities.normal(4.0),
        densities.uniform(0.0, 1.0),
        densities.exponential(1.0),
        densities.laplace(1.0),
    ]


def _orders_between(low: float, high: float, count: int) -> list[float]:
    """count orders spread evenly in log scale strictly inside (low, high), skipping 1."""
    ratio = (high / low) ** (1.0 / (count + 1))
    orders = [round(low * ratio ** (index + 1), 10) for index in range(count)]
    return [order for order in orders if order != 1.0]


def _task(name: str, function: Callable[..., EpiReport | list[EpiReport]], *args, **kwargs) -> CheckTask:
    def run() -> list[EpiReport]:
        result = function(*args, **kwargs)
        return result if isinstance(result, list) else [result]

    return CheckTask(name=name, run=run)


def _gaussian_oracle(sigma2: float, p: float, grid_n: int) -> EpiReport:
    numeric = entropy.renyi_entropy(densities.normal(sigma2), p, grid_n=grid_n).nats
    exact = entropy.normal_entropy_closed_form(sigma2, 1, p).nats
    return make_accuracy_report(
        KIND_ENTROPY_ORACLE,
        abs(numeric - exact),
        ORACLE_TOLERANCE,
        inputs={"density": densities.normal(sigma2), "p": p, "oracle": "normal"},
        r=p,
        details={"numeric": numeric, "exact": exact},
    )


def _uniform_flatness(p: float, grid_n: int) -> EpiReport:
    numeric = entropy.renyi_entropy(densities.uniform(0.0, 2.0), p, grid_n=grid_n).nats
    return make_accuracy_report(
        KIND_ENTROPY_ORACLE,
        abs(numeric - math.log(2.0)),
        FLATNESS_TOLERANCE,
        inputs={"density": densities.uniform(0.0, 2.0), "p": p, "oracle": "uniform"},
        r=p,
        details={"numeric": numeric},
    )


def _info_equality(f: Density1D, p: float, settings: SuiteSettings) -> list[EpiReport]:
    report = epi_verify.info_inequality_gap(
        f, densities.escort(f, p), p, tolerance=settings.tolerance_info, grid_n=settings.grid_n
    )
    tightness = make_accuracy_report(
        KIND_INFO_INEQ,
        abs(report.gap),
        settings.tolerance_info,
        inputs={"f": f, "p": p, "equality": True},
        r=p,
        details={"equality": True, "gap": report.gap},
    )
    return [report, tightness]


def _varentropy_reports(d: Density1D, p: float, grid_n: int) -> list[EpiReport]:
    reports = [entropy.varentropy_check(d, p, grid_n=grid_n)]
    if d.kind == densities.KIND_NORMAL:
        value = entropy.varentropy(d, p, grid_n=grid_n).value
        reports.append(
            make_accuracy_report(
                KIND_VARENTROPY,
                abs(value - 1.0 / (2.0 * p * p)),
                ORACLE_TOLERANCE,
                inputs={"density": d, "p": p, "oracle": "normal"},
                r=p,
                details={"value": value},
            )
        )
    return reports


def _dct_equality(sigma2: float, r: float, lam: float, settings: SuiteSettings) -> list[EpiReport]:
    part = densities.normal(sigma2)
    report = epi_verify.dct_gap(
        part, part, triple_from_lambda(r, lam), tolerance=settings.tolerance_nats, grid_n=settings.grid_n
    )
    tightness = make_accuracy_report(
        report.kind,
        abs(report.gap),
        settings.tolerance_nats,
        inputs={"equality": True, "sigma2": sigma2, "r": r, "lambda": lam},
        r=r,
        m=2,
        details={"equality": True, "gap": report.gap},
    )
    return [tightness]


def _transport_reports(grid_n: int) -> list[EpiReport]:
    gaussian = transport.monotone_transport(densities.normal(4.0), 1.0, grid_n=grid_n)
    slopes = gaussian.derivative()
    inside = abs(gaussian.xs) <= 5.0
    slope_error = float(max(abs(slopes[inside] - 2.0)))
    reports = [
        transport.pushforward_check(gaussian),
        make_accuracy_report(
            transport.KIND_PUSHFORWARD,
            slope_error,
            1e-8,
            inputs={"target": densities.normal(4.0), "sigma2": 1.0, "check": "affine_slope"},
            details={"slope_error": slope_error},
        ),
        transport.pushforward_check(transport.monotone_transport(densities.exponential(1.0), 1.0, grid_n=grid_n)),
    ]
    reports.extend(transport.rotation_check(lam, 2.0) for lam in (0.1, 0.3, 0.5, 0.7, 0.9))
    return reports


def _invariance_phis(f: Density1D, p: float, grid_n: int) -> list[Density1D]:
    tilted = densities.escort(f, p)
    return [tilted, densities.laplace(2.0), densities.scale(tilted, 1.5, grid_n=grid_n)]


def _form_constants(r: float) -> list[tuple[float, float]]:
    if r > 1.0:
        return [
            (exponents.constant_ram_sason(r, 2), 1.0),
            (1.0, exponents.alpha_li_two_variable(r)),
            (exponents.constant_general(r, 2, 0.5), 0.5),
        ]
    return [
        (exponents.constant_logconcave(r, 2), 1.0),
        (1.0, exponents.alpha_logconcave_two_variable(r)),
        (exponents.constant_logconcave_general(r, 2, 0.5), 0.5),
    ]


def build_entropy_tasks(settings: SuiteSettings, *, orders: int = 20) -> list[CheckTask]:
    grid_n = settings.grid_n
    suite = density_suite()
    tasks = [
        _task(f"oracle normal({sigma2:g}) p={p:g}", _gaussian_oracle, sigma2, p, grid_n)
        for sigma2 in (0.25, 1.0, 4.0)
        for p in (0.5, 1.0 - 1e-5, 1.0 + 1e-5, 2.0, 3.0, 10.0)
    ]
    grid = _orders_between(0.1, 10.0, orders)
    tasks.extend(_task(f"uniform flatness p={p:g}", _uniform_flatness, p, grid_n) for p in grid)
    for d in suite:
        for low, high in zip(grid[:-1], grid[1:]):
            tasks.append(
                _task(
                    f"monotonicity {density_label(d)} {low:g}<{high:g}",
                    entropy.monotonicity_check,
                    d,
                    low,
                    high,
                    tolerance=1e-8,
                    grid_n=grid_n,
                )
            )
    for d in (densities.normal(1.0), densities.exponential(1.0), densities.laplace(1.0)):
        for p in (0.5, 2.0, 3.0):
            tasks.append(
                _task(f"derivative identity {density_label(d)} p={p:g}", entropy.derivative_identity_check, d, p, grid_n=grid_n)
            )
    for d in suite:
        for p in (0.5, 1.0, 2.0, 4.0):
            tasks.append(_task(f"varentropy {density_label(d)} p={p:g}", _varentropy_reports, d, p, grid_n))
    scan = [round(0.3 + 0.1 * index, 10) for index in range(28)]
    shifted = [order for order in scan if order != 1.0]
    for d in suite:
        tasks.append(_task(f"concavity {density_label(d)}", entropy.concavity_check, d, scan, grid_n=grid_n))
        for low, high in zip(shifted[:-1], shifted[1:]):
            tasks.append(
                _task(
                    f"shifted monotonicity {density_label(d)} {low:g}<{high:g}",
                    entropy.shifted_monotonicity_check,
                    d,
                    low,
                    high,
                    grid_n=grid_n,
                )
            )
    return tasks


def build_information_tasks(settings: SuiteSettings) -> list[CheckTask]:
    grid_n = settings.grid_n
    tasks: list[CheckTask] = []
    for f in density_suite():
        for p in (0.5, 2.0, 3.0):
            tasks.append(_task(f"info equality {density_label(f)} p={p:g}", _info_equality, f, p, settings))
            phi = densities.laplace(3.0) if p < 1.0 else densities.normal(1.0)
            tasks.append(
                _task(
                    f"info inequality {density_label(f)} phi={density_label(phi)} p={p:g}",
                    epi_verify.info_inequality_gap,
                    f,
                    phi,
                    p,
                    tolerance=settings.tolerance_info,
                    grid_n=grid_n,
                )
            )
    for p in (0.5, 2.0):
        for f in (densities.normal(1.0), densities.exponential(1.0), densities.uniform(0.0, 1.0)):
            for phi in _invariance_phis(f, p, grid_n):
                tasks.append(
                    _task(
                        f"invariance {density_label(f)} phi={density_label(phi)} p={p:g}",
                        transport.invariance_check,
                        f,
                        phi,
                        p,
                        grid_n=grid_n,
                    )
                )
    tasks.append(_task("transport maps", _transport_reports, grid_n))
    return tasks


def build_epi_tasks(settings: SuiteSettings, *, form_orders: tuple[float, ...] = (0.3, 0.5, 0.8, 1.5, 2.0, 4.0)) -> list[CheckTask]:
    grid_n = settings.grid_n
    suite = density_suite()
    pairs = list(combinations_with_replacement(suite, 2))
    tasks: list[CheckTask] = []
    for r in (0.5, 2.0):
        for lam in (0.25, 0.5, 0.75):
            triple = triple_from_lambda(r, lam)
            for fx, fy in pairs:
                tasks.append(
                    _task(
                        f"dct {density_label(fx)}+{density_label(fy)} r={r:g} lambda={lam:g}",
                        epi_verify.dct_gap,
                        fx,
                        fy,
                        triple,
                        tolerance=settings.tolerance_nats,
                        grid_n=grid_n,
                    )
                )
            for sigma2 in (1.0, 4.0):
                tasks.append(_task(f"dct equality normal({sigma2:g}) r={r:g} lambda={lam:g}", _dct_equality, sigma2, r, lam, settings))

    normal, normal4, uniform, exponential, laplace = suite
    for parts, orders in (
        ((normal, normal, normal), (1.2, 1.2, 1.2)),
        ((uniform, uniform, uniform), (1.2, 1.2, 1.2)),
        ((normal, exponential, laplace), (1.2, 1.2, 1.2)),
        ((normal4, uniform, exponential), (Exponent.from_conjugate(4.0), Exponent.from_conjugate(8.0), Exponent.from_conjugate(8.0))),
    ):
        tasks.append(
            _task(
                "dct_m " + "+".join(density_label(part) for part in parts),
                epi_verify.dct_gap_m,
                list(parts),
                2.0,
                list(orders),
                tolerance=settings.tolerance_nats,
                grid_n=grid_n,
            )
        )

    for r in form_orders:
        for c, alpha in _form_constants(r):
            for fx, fy in pairs:
                tasks.append(
                    _task(
                        f"form {density_label(fx)}+{density_label(fy)} r={r:g} c={c:.6g} alpha={alpha:.6g}",
                        epi_verify.epi_form_check,
                        [fx, fy],
                        r,
                        c,
                        alpha,
                        tolerance=settings.tolerance_power,
                        grid_n=grid_n,
                    )
                )

    c_two = exponents.constant_ram_sason(2.0, 2)
    tasks.extend(
        [
            _task("characterization equivalence normal pair", epi_verify.equivalence_check, [normal, normal], 2.0, c_two, 1.0, grid_n=grid_n),
            _task(
                "characterization equivalence skewed normals",
                epi_verify.equivalence_check,
                [densities.normal(0.01), densities.normal(100.0)],
                2.0,
                c_two,
                1.0,
                grid_n=grid_n,
            ),
            _task(
                "characterization equivalence uniform+exponential",
                epi_verify.equivalence_check,
                [uniform, exponential],
                2.0,
                c_two,
                1.0,
                grid_n=grid_n,
            ),
        ]
    )
    return tasks


def build_optimizer_tasks(settings: SuiteSettings, *, orders: tuple[float, ...] = (1.5, 2.0, 4.0)) -> list[CheckTask]:
    tasks: list[CheckTask] = []

    def reproduce_a(r: float, m: int) -> list[EpiReport]:
        reference = math.log(exponents.constant_ram_sason(r, m) if r > 1 else exponents.constant_logconcave(r, m))
        result = optimizer.minimize_A(r, m)
        return [
            optimizer.closed_form_check(result, reference, 1e-6, label="log c"),
            optimizer.sanity_check(result, seed=settings.seed),
        ]

    def reproduce_ratio(r: float, m: int) -> list[EpiReport]:
        result = optimizer.minimize_A_over_H(r, m)
        reports = [optimizer.sanity_check(result, seed=settings.seed)]
        if m == 2:
            reports.append(optimizer.closed_form_check(result, 1.0 / exponents.alpha_li_two_variable(r) - 1.0, 2e-3, label="1/alpha - 1"))
        else:
            reference = optimizer.minimize_A_over_H(r, 2).value
            reports.append(optimizer.closed_form_check(result, reference, 2e-3, label="boundary minimum"))
        return reports

    def reproduce_mixed(r: float, m: int, alpha: float) -> list[EpiReport]:
        if r > 1:
            reference = math.log(exponents.constant_general(r, m, alpha))
        else:
            reference = math.log(exponents.constant_logconcave_general(r, m, alpha))
        result = optimizer.minimize_mixed(r, m, alpha)
        return [
            optimizer.closed_form_check(result, reference, 1e-6, label="log c"),
            optimizer.sanity_check(result, seed=settings.seed),
        ]

    for r in orders:
        for m in (2, 3):
            tasks.append(_task(f"minimize A r={r:g} m={m}", reproduce_a, r, m))
            tasks.append(_task(f"minimize A/H r={r:g} m={m}", reproduce_ratio, r, m))
            tasks.append(_task(f"minimize mixed r={r:g} m={m}", reproduce_mixed, r, m, 0.5))
    tasks.append(_task("minimize A r=0.5 m=2", reproduce_a, 0.5, 2))
    tasks.append(_task("minimize mixed r=0.5 m=2", reproduce_mixed, 0.5, 2, 0.5))
    return tasks


def build_default_tasks(settings: SuiteSettings) -> list[CheckTask]:
    return build_entropy_tasks(settings) + build_information_tasks(settings) + build_epi_tasks(settings)


def build_quick_tasks(settings: SuiteSettings) -> list[CheckTask]:
    grid_n = settings.grid_n
    normal, _, uniform, exponential, _ = density_suite()
    return [
        _task("oracle normal(1) p=2", _gaussian_oracle, 1.0, 2.0, grid_n),
        _task("uniform flatness p=0.5", _uniform_flatness, 0.5, grid_n),
        _task("info equality normal(1) p=2", _info_equality, normal, 2.0, settings),
        _task("derivative identity normal(1) p=2", entropy.derivative_identity_check, normal, 2.0, grid_n=grid_n),
        _task(
            "dct uniform pair r=2",
            epi_verify.dct_gap,
            uniform,
            uniform,
            triple_from_lambda(2.0, 0.5),
            tolerance=settings.tolerance_nats,
            grid_n=grid_n,
        ),
        _task(
            "form exponential pair r=0.5",
            epi_verify.epi_form_check,
            [exponential, exponential],
            0.5,
            exponents.constant_logconcave(0.5, 2),
            1.0,
            tolerance=settings.tolerance_power,
            grid_n=grid_n,
        ),
        _task("rotation lambda=0.3", transport.rotation_check, 0.3, 2.0),
    ]


SUITES: dict[str, VerificationSuite] = {
    "default": VerificationSuite(
        id="default",
        label="Default",
        description=(
            "Entropy oracles, orderings, the information inequality, transport invariance,"
            " DCT and entropy power forms over the five-density suite."
        ),
        build_tasks=build_default_tasks,
    ),
    "quick": VerificationSuite(
        id="quick",
        label="Quick",
        description="One representative check per family, for smoke runs.",
        build_tasks=build_quick_tasks,
    ),
    "optimizer": VerificationSuite(
        id="optimizer",
        label="Optimizer",
        description="Simplex minimisations of A, A/H and the mixed objective against the closed-form constants.",
        build_tasks=build_optimizer_tasks,
    ),
}


def get_suite(suite_id: str) -> VerificationSuite:
    suite = SUITES.get((suite_id or "").strip())
    if suite is None:
        raise EpiError(ERROR_USAGE, f"unknown suite {suite_id!r}; choose one of {', '.join(sorted(SUITES))}")
    return suite


def _run_task(task: CheckTask) -> tuple[CheckTask, list[EpiReport], str | None]:
    try:
        return task, task.run(), None
    except EpiError as exc:
        return task, [], f"{task.name}: [{exc.code}] {exc.message}"


def run_tasks(tasks: list[CheckTask], *, workers: int = 1, tag: str = "verify", verbose: bool = True) -> SuiteOutcome:
    outcome = SuiteOutcome()
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for task, reports, error in pool.map(_run_task, tasks):
            if error is not None:
                outcome.errors.append(error)
                print(f"[{tag}] error in {error}", file=sys.stderr)
                continue
            outcome.reports.extend(reports)
            if verbose:
                failed = sum(1 for report in reports if report_failed(report))
                status = "ok" if failed == 0 else f"{failed} failed"
                print(f"[{tag}] {task.name}: {status}", file=sys.stderr)
    outcome.reports = sort_reports(outcome.reports)
    return outcome


def run_suite(suite_id: str, settings: SuiteSettings, *, workers: int = 1, tag: str = "verify", verbose: bool = True) -> SuiteOutcome:
    suite = get_suite(suite_id)
    tasks = suite.build_tasks(settings)
    if verbose:
        print(f"[{tag}] suite {suite.id}: {len(tasks)} tasks on grid {settings.grid_n}", file=sys.stderr)
    return run_tasks(tasks, workers=workers, tag=tag, verbose=verbose)
