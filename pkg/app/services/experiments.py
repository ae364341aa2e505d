"""Experiment drivers: build function families, integrate, check inequalities, fit growth rates.

Every driver returns ExperimentRecord rows in deterministic parameter order.
Random draws come from runner.task_rng keyed by (seed, task index), so the
worker count never changes a result. "log" is the natural logarithm and
dA = dx dy / pi on both sides of every inequality.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union
import logging
import math
import time

import numpy as np

from app.config import settings
from app.core import blaschke, schur
from app.core.complexpoly import ComplexPoly, derivative, sup_modulus_on_circle, sup_norm_circle, truncate
from app.core.domains import DomainMap, HpClass, PullbackIntegrand, UnitDisk, hp_classification, sup_on_boundary
from app.core.errors import (
    ConfigError,
    DegenerateFitError,
    InadmissibleRegimeError,
    PoleValidationError,
    RhoOutOfRangeError,
)
from app.core.quadrature import (
    QuadratureResult,
    I_of,
    area_identity_check,
    circle_mean,
    disk_integral,
    star_polygon_integral,
)
from app.core.rational import RationalFunction, from_polynomials, taylor_coeffs, validate_poles_outside
from app.models.schemas import ExperimentParameters, ExperimentRecord, FitResult, SelftestRow
from app.services import families
from app.services.runner import run_tasks, task_rng

logger = logging.getLogger(__name__)

ZERO_RESULT = QuadratureResult(value=0.0, abs_error_estimate=0.0, node_count=0, converged=True)
CLASSIFY_THRESHOLD = 0.25
LEMMA1_SCALE = 0.99
LEMMA1_BLASCHKE_DEGREE = 64
LEMMA1_BM_J_MAX = 2
REGIME_EQUALITY_TOL = 1e-12
# phi' in H^p holds on an interval (0, p*), so "some gamma > 1" is decided just above 1
REGIME1_HARDY_EXPONENT = 1.0 + 1e-6


class GrowthModel(str, Enum):
    POWER = "power"              # y = C x^slope
    LOG = "log"                  # y = slope log x + C
    SQRT_LOG = "sqrt_log"        # y = slope sqrt(log x) + C
    CONSTANT = "constant"        # y = slope x + C
    LOG_POWER = "log_power"      # y = C (log x)^slope


LOG_Y_MODELS = (GrowthModel.POWER, GrowthModel.LOG_POWER)


def _as_float(value):
    return None if value is None else float(value)


def make_record(
    experiment: str,
    measured: Optional[float] = None,
    bound: Optional[float] = None,
    bound_tol: Optional[float] = None,
    violation: Optional[bool] = None,
    fit: Optional[FitResult] = None,
    extras: Optional[Dict[str, object]] = None,
    **fields,
) -> ExperimentRecord:
    """Record with violation = measured > bound (1 + bound_tol) unless given explicitly"""
    bound_tol = settings.BOUND_TOL if bound_tol is None else bound_tol
    measured, bound = _as_float(measured), _as_float(bound)
    if violation is None:
        violation = measured is not None and bound is not None and measured > bound * (1.0 + bound_tol)
    extras = dict(extras or {})
    if fit is not None:
        extras["model"] = fit.model
        fields.update(fit_slope=fit.slope, fit_const=fit.constant, r2=fit.r2)
    return ExperimentRecord(
        experiment=experiment,
        measured=measured,
        bound=bound,
        bound_tol=bound_tol,
        violation=bool(violation),
        extras=extras,
        **fields,
    )


def _elapsed_ms(start: float) -> float:
    return (time.perf_counter() - start) * 1000.0


# ---------------------------------------------------------------------------
# growth fits


def fit_growth(xs: Sequence[float], ys: Sequence[float], model: Union[str, GrowthModel]) -> FitResult:
    """
    Least squares on the model's linearizing transform

    Args:
        xs: strictly increasing abscissae
        ys: values, positive for the log-axis models (power, log_power)
        model: growth model

    Returns:
        FitResult; for log-axis models ``constant`` is C itself, not log C
    """
    model = GrowthModel(model)
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise ValueError("xs and ys must be one-dimensional and of equal length")
    if x.size < 3:
        raise ValueError("a growth fit needs at least three points")
    if np.any(np.diff(x) <= 0):
        raise ValueError("xs must be strictly increasing")
    if model in LOG_Y_MODELS and np.any(y <= 0):
        raise ValueError(f"model '{model.value}' needs positive ys")
    if model in (GrowthModel.POWER, GrowthModel.LOG) and np.any(x <= 0):
        raise ValueError(f"model '{model.value}' needs positive xs")
    if model == GrowthModel.SQRT_LOG and np.any(x < 1):
        raise ValueError("model 'sqrt_log' needs xs >= 1")
    if model == GrowthModel.LOG_POWER and np.any(x <= 1):
        raise ValueError("model 'log_power' needs xs > 1")

    if model == GrowthModel.POWER:
        X, Y = np.log(x), np.log(y)
    elif model == GrowthModel.LOG:
        X, Y = np.log(x), y
    elif model == GrowthModel.SQRT_LOG:
        X, Y = np.sqrt(np.log(x)), y
    elif model == GrowthModel.LOG_POWER:
        X, Y = np.log(np.log(x)), np.log(y)
    else:
        X, Y = x, y

    A = np.column_stack([X, np.ones_like(X)])
    coef, _, rank, _ = np.linalg.lstsq(A, Y, rcond=None)
    if rank < 2:
        raise DegenerateFitError(f"design matrix for model '{model.value}' has rank {rank}")
    residual = Y - A @ coef
    ss_res = float(np.sum(residual ** 2))
    ss_tot = float(np.sum((Y - np.mean(Y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    constant = math.exp(coef[1]) if model in LOG_Y_MODELS else float(coef[1])
    return FitResult(model=model.value, slope=float(coef[0]), constant=float(constant), r2=float(r2))


def _try_fit(xs, ys, model) -> Optional[FitResult]:
    """fit_growth, or None when the grid cannot support a fit"""
    try:
        return fit_growth(xs, ys, model)
    except (ValueError, DegenerateFitError) as e:
        logger.info(f"No {GrowthModel(model).value} fit: {e}")
        return None


def classify_growth(ns: Sequence[int], ys: Sequence[float]) -> Tuple[GrowthModel, FitResult]:
    """Power growth if the log-log slope is clearly positive, else (log n)^a if that slope is, else constant"""
    ns = np.asarray(ns, dtype=float)
    power = fit_growth(ns, ys, GrowthModel.POWER)
    if power.slope > CLASSIFY_THRESHOLD:
        return GrowthModel.POWER, power
    log_power = fit_growth(ns + 1.0, ys, GrowthModel.LOG_POWER)
    if log_power.slope > CLASSIFY_THRESHOLD:
        return GrowthModel.LOG_POWER, log_power
    return GrowthModel.CONSTANT, power


def exponent_tolerance(predicted: float) -> float:
    """Allowed |fitted - predicted| exponent: relative FIT_TOLERANCE, absolute when predicted is 0"""
    return settings.FIT_TOLERANCE * (abs(predicted) if predicted else 1.0)


# ---------------------------------------------------------------------------
# shared w-plane machinery


def _slope(R: RationalFunction):
    """R' in a form the quadrature can evaluate; polynomials get FFT circle grids"""
    if R.denominator.degree == 0:
        return derivative(R.numerator) * (1.0 / R.denominator.coeffs[0])
    return R.deriv


def boundary_sup(d: DomainMap, R: RationalFunction) -> float:
    """M = max |R| over the closed domain"""
    if isinstance(d, UnitDisk) and R.denominator.degree == 0:
        return sup_norm_circle(R.numerator) / abs(R.denominator.coeffs[0])
    return sup_on_boundary(d, R, settings.BOUNDARY_SAMPLES).value


def check_poles(d: DomainMap, R: RationalFunction, family: str, n: int, band_delta: Optional[float] = None):
    margin = 0.0
    if family == "boundary_pole_rational":
        margin = 0.5 * families.boundary_pole_offset(d, n, band_delta)
    if not validate_poles_outside(d, R, margin):
        raise PoleValidationError(f"{family} of degree {n} has a pole within {margin:g} of {d.describe()}")


def weighted_integral(
    d: DomainMap, R: RationalFunction, p: float, beta: float = 0.0, tol: float = None, probe: bool = False
) -> QuadratureResult:
    """int_G |R'|^p d_G^beta dA through the pullback to the disk.

    With ``probe`` the conjectured form int_D |(R o phi)'|^p (1-|z|)^(p-2) dA instead.
    """
    disk = isinstance(d, UnitDisk)
    if probe:
        if disk:
            return disk_integral(_slope(R), p, p - 2.0, tol=tol, hint_degree=R.degree)
        integrand = PullbackIntegrand(d, R, p, phi_prime_power=0.0)
        return disk_integral(integrand, 1.0, p - 2.0, tol=tol, hint_degree=R.degree)
    if disk:
        return disk_integral(_slope(R), p, beta, tol=tol, hint_degree=R.degree)
    return disk_integral(PullbackIntegrand(d, R, p, beta=beta), 1.0, 0.0, tol=tol, hint_degree=R.degree)


@dataclass(frozen=True)
class WTask:
    """One (degree, sample) point of a w-plane sweep"""

    index: int
    n: int
    sample: int
    domain: DomainMap
    family: str
    p: float
    beta: float = 0.0
    probe: bool = False
    seed: Optional[int] = None
    zero_law: str = "uniform_disk"
    band_delta: Optional[float] = None
    j_max: Optional[int] = None
    rho: Optional[float] = None
    tol: Optional[float] = None
    bound_tol: Optional[float] = None


@dataclass
class WOutcome:
    n: int
    sample: int
    integral: QuadratureResult
    sup: float
    wall_ms: float
    sup_power: float = 1.0

    @property
    def normalized(self) -> float:
        return self.integral.value / self.sup_power if self.sup_power > 0 else 0.0


def build_w_function(task: WTask) -> Tuple[RationalFunction, int]:
    if task.family == "banuelos_moore":
        p = families.banuelos_moore_polynomial(task.j_max)
        q = p * (1.0 / (sup_norm_circle(p) * (1.0 + families.SUP_MARGIN)))
        return from_polynomials(q), 4 ** (task.j_max + 1) - 1
    rng = task_rng(task.seed, task.index) if task.seed is not None else None
    R = families.build_family(
        task.family, task.domain, task.n, rng, law=task.zero_law, band_delta=task.band_delta
    )
    check_poles(task.domain, R, task.family, task.n, task.band_delta)
    return R, task.n


def _w_integral_task(task: WTask) -> WOutcome:
    start = time.perf_counter()
    R, n = build_w_function(task)
    M = boundary_sup(task.domain, R)
    integral = weighted_integral(task.domain, R, task.p, task.beta, task.tol, task.probe)
    return WOutcome(
        n=n, sample=task.sample, integral=integral, sup=M, wall_ms=_elapsed_ms(start), sup_power=M ** task.p
    )


def _w_sweep(
    d: DomainMap,
    p: float,
    degrees: Sequence[int],
    family: str,
    seed: Optional[int],
    samples: int,
    beta: float = 0.0,
    probe: bool = False,
    zero_law: str = "uniform_disk",
    band_delta: Optional[float] = None,
    j_grid: Sequence[int] = (),
    tol: float = None,
    jobs: int = 1,
) -> List[WOutcome]:
    if family == "random_blaschke_in_w" and seed is None:
        raise ConfigError("family 'random_blaschke_in_w' needs a seed", field="seed")
    if family == "banuelos_moore":
        if not isinstance(d, UnitDisk):
            raise ConfigError("the banuelos_moore family lives in the unit disk", field="domain")
        grid = [(0, j) for j in j_grid]
        samples = 1
    else:
        if any(n < 1 for n in degrees):
            raise ConfigError("scaling sweeps need degrees >= 1", field="degrees")
        grid = [(n, None) for n in degrees]
    repeats = samples if family == "random_blaschke_in_w" else 1
    tasks = []
    for n, j in grid:
        for s in range(repeats):
            tasks.append(
                WTask(
                    index=len(tasks), n=n, sample=s, domain=d, family=family, p=p, beta=beta, probe=probe,
                    seed=seed, zero_law=zero_law, band_delta=band_delta, j_max=j, tol=tol,
                )
            )
    return run_tasks(_w_integral_task, tasks, jobs)


def _worst_by_degree(outcomes: List[WOutcome]) -> Tuple[np.ndarray, np.ndarray]:
    worst: Dict[int, float] = {}
    for o in outcomes:
        worst[o.n] = max(worst.get(o.n, 0.0), o.normalized)
    ns = np.array(sorted(worst), dtype=float)
    return ns, np.array([worst[int(n)] for n in ns])


def running_growth(ratios: Sequence[float]) -> Tuple[float, List[float]]:
    """Relative increase of the running max of ``ratios`` over the top half of the grid"""
    running = np.maximum.accumulate(np.asarray(ratios, dtype=float))
    if running.size < 2:
        return 0.0, running.tolist()
    mid = (running.size - 1) // 2
    if running[mid] <= 0.0:
        return 0.0, running.tolist()
    return float(running[-1] / running[mid] - 1.0), running.tolist()


def _degree_records(
    experiment: str,
    outcomes: List[WOutcome],
    d: DomainMap,
    p: float,
    beta: Optional[float],
    seed: Optional[int],
    family: str,
    rate: Callable[[int], float],
    bound_tol: Optional[float],
    normative: bool = True,
) -> List[ExperimentRecord]:
    records = []
    for o in outcomes:
        extras = {
            "family": family,
            "sample": o.sample,
            "integral": o.integral.value,
            "abs_error_estimate": o.integral.abs_error_estimate,
            "sup": o.sup,
            "ratio_to_rate": o.normalized / rate(o.n),
        }
        if not normative:
            extras["normative"] = False
        records.append(
            make_record(
                experiment, n=o.n, p=p, beta=beta, domain=d.describe(), seed=seed, measured=o.normalized,
                bound_tol=bound_tol, converged=o.integral.converged, wall_ms=o.wall_ms, extras=extras,
            )
        )
    return records


def _bounded_ratio_summary(
    experiment: str,
    outcomes: List[WOutcome],
    d: DomainMap,
    p: float,
    seed: Optional[int],
    rate: Callable[[int], float],
    fit_model: GrowthModel,
    fit_shift: float,
    bound_tol: Optional[float],
) -> ExperimentRecord:
    """Growth of the running max of I_norm / rate over the top half of the grid, plus the rate fit"""
    ns, worst = _worst_by_degree(outcomes)
    ratios = [y / rate(int(n)) for n, y in zip(ns, worst)]
    growth, running = running_growth(ratios)
    fit = _try_fit(ns + fit_shift, worst, fit_model)
    return make_record(
        experiment, p=p, domain=d.describe(), seed=seed, measured=growth,
        bound=settings.DOLZHENKO_GROWTH_LIMIT, bound_tol=bound_tol, fit=fit,
        extras={"running_max": running, "degrees": ns.astype(int).tolist(), "model": fit_model.value},
    )


def _admissible_john(d: DomainMap):
    if not d.hp_finite(1.0):
        raise InadmissibleRegimeError("phi' in H^1 (rectifiable boundary)")


# ---------------------------------------------------------------------------
# Theorem 1: upper bound for I(B)


def theorem1_bound(n: int) -> float:
    """pi (1 + sqrt(log n)), natural log; pi at n <= 1"""
    return math.pi * (1.0 + math.sqrt(math.log(max(n, 1))))


def theorem1_split(n: int) -> float:
    """Radius s with s^2 = 1 - 1/n separating the annulus and inner terms"""
    return math.sqrt(1.0 - 1.0 / n) if n > 1 else 0.0


def _theorem1_task(task) -> ExperimentRecord:
    index, n, sample, zero_law, band_delta, seed, tol, bound_tol = task
    start = time.perf_counter()
    B = families.random_blaschke(n, zero_law, task_rng(seed, index), band_delta)
    s = theorem1_split(n)
    half = 0.5 * (tol or settings.QUADRATURE_TOL)
    outer = disk_integral(B.deriv, 1.0, 0.0, s, 1.0, half, hint_degree=n)
    inner = disk_integral(B.deriv, 1.0, 0.0, 0.0, s, half, hint_degree=n) if s > 0.0 else ZERO_RESULT
    extras = {
        "zero_law": zero_law,
        "sample": sample,
        "split_s": s,
        "outer": outer.value,
        "outer_bound": n * (1.0 - s * s),
        "inner": inner.value,
        "inner_bound": math.sqrt(math.log(1.0 / (1.0 - s * s))),
        "abs_error_estimate": inner.abs_error_estimate + outer.abs_error_estimate,
        "log": "natural",
    }
    return make_record(
        "verify-theorem1", n=n, domain="unit_disk", seed=seed, measured=inner.value + outer.value,
        bound=theorem1_bound(n), bound_tol=bound_tol, converged=inner.converged and outer.converged,
        wall_ms=_elapsed_ms(start), extras=extras,
    )


def verify_theorem1_upper(
    degrees: Sequence[int],
    samples_per_degree: int,
    zero_law: str,
    seed: int,
    band_delta: Optional[float] = None,
    tol: float = None,
    bound_tol: float = None,
    jobs: int = 1,
) -> List[ExperimentRecord]:
    """
    I(B) <= pi (1 + sqrt(log n)) for random Blaschke products

    One record per (degree, sample); extras carry the annulus/inner split at s^2 = 1 - 1/n.
    """
    if seed is None:
        raise ConfigError("verify-theorem1 draws random zeros and needs a seed", field="seed")
    tasks = []
    for n in degrees:
        for sample in range(samples_per_degree):
            tasks.append((len(tasks), n, sample, zero_law, band_delta, seed, tol, bound_tol))
    return run_tasks(_theorem1_task, tasks, jobs)


# ---------------------------------------------------------------------------
# Bañuelos–Moore lower-bound construction


def _lower_bound_task(task) -> Tuple[ExperimentRecord, float]:
    index, j, sample, strategy, sign_randomization, seed, taylor_count, tol = task
    start = time.perf_counter()
    rng = task_rng(seed, index) if seed is not None else None
    res = families.banuelos_moore_construct(j, strategy, sign_randomization, rng, taylor_count, tol)
    m = res.nominal_degree
    extras = {
        "j_max": j,
        "sample": sample,
        "strategy": strategy,
        "sign_randomization": sign_randomization,
        "sup_norm": res.sup_norm,
        "entropy_ratio": res.entropy_ratio,
        "ratio_to_sqrt_log": res.integral.value / math.sqrt(math.log(m)),
        "taylor_count": res.taylor_count,
        "taylor_achieved": res.taylor_achieved,
        "block_sup_max": max(res.block_sup_norms),
        "blaschke_degree": res.params.degree,
    }
    record = make_record(
        "lower-bound", n=m, domain="unit_disk", seed=seed, measured=res.integral.value,
        converged=res.integral.converged, wall_ms=_elapsed_ms(start), extras=extras,
    )
    return record, res.sup_norm


def lower_bound_sweep(
    j_grid: Sequence[int],
    strategy: str = "rudin_shapiro_scaled",
    sign_randomization: bool = False,
    seed: Optional[int] = None,
    samples: int = 1,
    taylor_count: int = None,
    tol: float = None,
    jobs: int = 1,
) -> List[ExperimentRecord]:
    """I(B_m) for Bañuelos–Moore products plus a summary of I/sqrt(log m).

    The summary's violation flag is set when the lower-bound evidence fails:
    a non-positive minimum ratio or a negative fitted sqrt-log slope.
    """
    randomized = sign_randomization or strategy != "rudin_shapiro_scaled"
    if randomized and seed is None:
        raise ConfigError("randomized block strategies need a seed", field="seed")
    repeats = samples if randomized else 1
    tasks = []
    for j in j_grid:
        for sample in range(repeats):
            tasks.append((len(tasks), j, sample, strategy, sign_randomization, seed, taylor_count, tol))
    results = run_tasks(_lower_bound_task, tasks, jobs)
    records = [r for r, _ in results]

    js = sorted(set(j_grid))
    ms = np.array([4 ** (j + 1) - 1 for j in js], dtype=float)
    medians = np.array([np.median([r.measured for r in records if r.extras["j_max"] == j]) for j in js])
    sups = np.array([np.median([s for r, s in results if r.extras["j_max"] == j]) for j in js])
    min_ratio = min(r.extras["ratio_to_sqrt_log"] for r in records)
    fit = _try_fit(ms, medians, GrowthModel.SQRT_LOG)
    sup_fit = _try_fit(np.array(js, dtype=float), sups, GrowthModel.POWER)
    holds = min_ratio > 0.0 and (fit is None or fit.slope >= 0.0)
    extras = {
        "min_ratio_to_sqrt_log": min_ratio,
        "fitted_lower_constant": fit.constant if fit else None,
        "property_holds": holds,
        "median_sup_norm": sups.tolist(),
        "sup_norm_exponent_in_j": sup_fit.slope if sup_fit else None,
    }
    records.append(
        make_record("lower-bound", domain="unit_disk", seed=seed, measured=min_ratio, violation=not holds,
                    fit=fit, extras=extras)
    )
    return records


# ---------------------------------------------------------------------------
# Lemma 1: truncations of Schur-class functions


@dataclass(frozen=True)
class SchurClassFunction:
    """g with ||g||_inf <= 1, given by its Taylor coefficients and its derivative"""

    name: str
    coefficients: Callable[[int], np.ndarray]
    slope: Callable[[np.ndarray], np.ndarray]


def schur_family(name: str, seed: Optional[int] = None) -> SchurClassFunction:
    if name == "zero":
        return SchurClassFunction(name, lambda n: np.zeros(n + 1, dtype=complex), lambda z: np.zeros_like(z))

    if name == "scaled_identity":
        def coefficients(n):
            c = np.zeros(n + 1, dtype=complex)
            if n >= 1:
                c[1] = LEMMA1_SCALE
            return c

        return SchurClassFunction(name, coefficients, lambda z: np.full(np.shape(z), LEMMA1_SCALE, dtype=complex))

    if name == "scaled_blaschke":
        if seed is None:
            raise ConfigError("g family 'scaled_blaschke' needs a seed", field="seed")
        B = families.random_blaschke(LEMMA1_BLASCHKE_DEGREE, "uniform_disk", task_rng(seed, 0))
        return SchurClassFunction(
            name, lambda n: LEMMA1_SCALE * blaschke.taylor_coeffs(B, n), lambda z: LEMMA1_SCALE * B.deriv(z)
        )

    if name == "scaled_banuelos_moore":
        p = families.banuelos_moore_polynomial(LEMMA1_BM_J_MAX)
        q = p * (LEMMA1_SCALE / (sup_norm_circle(p) * (1.0 + families.SUP_MARGIN)))

        def coefficients(n):
            c = np.zeros(n + 1, dtype=complex)
            head = q.coeffs[: n + 1]
            c[: head.size] = head
            return c

        return SchurClassFunction(name, coefficients, q.deriv)

    raise ValueError(f"unknown g family '{name}'")


def lemma1_radius(n: int) -> float:
    return 1.0 - 2.0 * math.log(n) / n


def lemma1_check(
    g_family: Sequence[SchurClassFunction], n_grid: Sequence[int], bound_tol: float = None, seed: Optional[int] = None
) -> List[ExperimentRecord]:
    """
    max |p| and max |g' - p'| on |z| <= 1 - 2 log n / n for p the degree-n truncation of g

    Two records per (g, n), ``lemma1.p`` and ``lemma1.dg``; the working
    constant C0 applies from n = 3 on (n = 2 is reported without a bound).
    """
    records = []
    for g in g_family:
        for n in n_grid:
            if n < 2:
                raise ValueError("lemma1 needs n >= 2 so that 1 - 2 log n / n > 0")
            start = time.perf_counter()
            radius = lemma1_radius(n)
            p = truncate(g.coefficients(n), n)
            p_prime = derivative(p)
            samples = max(256, 16 * (n + 1))
            max_p = sup_norm_circle(p, radius)

            def tail_slope(z, g=g, p_prime=p_prime):
                return np.asarray(g.slope(z)) - p_prime(z)

            max_dg = sup_modulus_on_circle(tail_slope, radius, samples)
            bound = settings.LEMMA1_C0 if n >= 3 else None
            wall = _elapsed_ms(start)
            extras = {"g_family": g.name, "radius": radius}
            for experiment, value in (("lemma1.p", max_p), ("lemma1.dg", max_dg)):
                records.append(
                    make_record(experiment, n=n, domain="unit_disk", seed=seed, measured=value, bound=bound,
                                bound_tol=bound_tol, wall_ms=wall, extras=extras)
                )
    return records


def _lemma1_task(task) -> List[ExperimentRecord]:
    name, n_grid, seed, bound_tol = task
    return lemma1_check([schur_family(name, seed)], n_grid, bound_tol, seed if name == "scaled_blaschke" else None)


# ---------------------------------------------------------------------------
# Lemma 2: circle means of |B'|^2


def lemma2_bound(n: int, r: float) -> float:
    return n / (1.0 - r)


def lemma2_check(
    B, r_grid: Sequence[float], tol: float = None, bound_tol: float = None, seed: Optional[int] = None,
    family: str = "blaschke",
) -> ExperimentRecord:
    """(1/2pi) int |B'(r e^{it})|^2 dt <= n/(1-r) on every grid radius; reports the worst radius"""
    start = time.perf_counter()
    n = B.degree
    rows = []
    for r in r_grid:
        if not 0.0 <= r < 1.0:
            raise ValueError("r_grid must be a subset of [0, 1)")
        rows.append((r, circle_mean(B.deriv, r, 2.0, tol, hint_degree=n), lemma2_bound(n, r)))
    r, mean, bound = max(rows, key=lambda row: row[1].value - row[2])
    return make_record(
        "lemma2", n=n, domain="unit_disk", seed=seed, measured=mean.value, bound=bound, bound_tol=bound_tol,
        converged=all(row[1].converged for row in rows), wall_ms=_elapsed_ms(start),
        extras={"family": family, "r": r, "r_grid": list(r_grid)},
    )


def _lemma2_task(task) -> ExperimentRecord:
    index, n, kind, zero_law, seed, r_grid, tol, bound_tol = task
    if kind == "power":
        return lemma2_check(families.power_blaschke(n), r_grid, tol, bound_tol, family="power")
    B = families.random_blaschke(n, zero_law, task_rng(seed, index))
    return lemma2_check(B, r_grid, tol, bound_tol, seed=seed, family=f"random_{zero_law}")


# ---------------------------------------------------------------------------
# Theorems 2 and 3: scaling of int_G |R'|^p dA


def dolzhenko_rate(p: float) -> Callable[[int], float]:
    """n^(p-1) for p > 1, log(n+1) at p = 1"""
    if p > 1.0:
        return lambda n: float(n) ** (p - 1.0)
    return lambda n: math.log(n + 1.0)


def dolzhenko_scaling(
    d: DomainMap,
    p: float,
    degrees: Sequence[int],
    family: str,
    seed: Optional[int] = None,
    samples: int = 1,
    zero_law: str = "uniform_disk",
    band_delta: Optional[float] = None,
    tol: float = None,
    bound_tol: float = None,
    jobs: int = 1,
) -> List[ExperimentRecord]:
    """
    int_G |R'|^p dA / M^p across degrees against n^(p-1) (p > 1) or log(n+1) (p = 1)

    The summary record carries the running-max growth over the top half of
    the grid (bounded by DOLZHENKO_GROWTH_LIMIT) and the rate fit.
    """
    if not 1.0 <= p <= 2.0:
        raise InadmissibleRegimeError("1 <= p <= 2")
    _admissible_john(d)
    rate = dolzhenko_rate(p)
    outcomes = _w_sweep(d, p, degrees, family, seed, samples, zero_law=zero_law, band_delta=band_delta,
                        tol=tol, jobs=jobs)
    records = _degree_records("dolzhenko", outcomes, d, p, None, seed, family, rate, bound_tol)
    if p > 1.0:
        summary = _bounded_ratio_summary("dolzhenko", outcomes, d, p, seed, rate, GrowthModel.POWER, 0.0, bound_tol)
    else:
        summary = _bounded_ratio_summary("dolzhenko", outcomes, d, p, seed, rate, GrowthModel.LOG_POWER, 1.0,
                                         bound_tol)
    return records + [summary]


def theorem3_rate(n: int) -> float:
    return math.sqrt(math.log(n + 1.0))


def theorem3_scaling(
    d: DomainMap,
    degrees: Sequence[int],
    family: str = "power_w_n",
    seed: Optional[int] = None,
    samples: int = 1,
    zero_law: str = "uniform_disk",
    band_delta: Optional[float] = None,
    bm_j_grid: Sequence[int] = (),
    tol: float = None,
    bound_tol: float = None,
    jobs: int = 1,
) -> List[ExperimentRecord]:
    """
    int_G |R'| dA / M against sqrt(log(n+1)) when phi' is in H^2, plus the
    Bañuelos–Moore products in the disk showing the matching lower rate
    """
    if not d.hp_finite(2.0):
        raise InadmissibleRegimeError("phi' in H^2")
    outcomes = _w_sweep(d, 1.0, degrees, family, seed, samples, zero_law=zero_law, band_delta=band_delta,
                        tol=tol, jobs=jobs)
    records = _degree_records("theorem3", outcomes, d, 1.0, None, seed, family, theorem3_rate, bound_tol)
    records.append(
        _bounded_ratio_summary("theorem3", outcomes, d, 1.0, seed, theorem3_rate, GrowthModel.SQRT_LOG, 1.0,
                               bound_tol)
    )
    if bm_j_grid:
        bm = lower_bound_sweep(bm_j_grid, tol=tol, jobs=jobs)
        for record in bm:
            record.experiment = "theorem3.bm"
            record.p = 1.0
        records.extend(bm)
    return records


# ---------------------------------------------------------------------------
# Theorem 4: A^p norm on G_rho


def interior_integral(d: DomainMap, R: RationalFunction, p: float, rho: float, tol: float = None) -> Tuple[QuadratureResult, str]:
    """int over G_rho of |R'|^p dA and the method used"""
    if isinstance(d, UnitDisk):
        return disk_integral(_slope(R), p, 0.0, 0.0, 1.0 - rho, tol, hint_degree=R.degree), "radial"
    inner_polygon = getattr(d, "inner_polygon", None)
    if inner_polygon is not None:
        def modulus(w):
            return np.abs(R.deriv(w)) ** p

        return star_polygon_integral(modulus, inner_polygon(rho), tol), "inner_polygon"
    integrand = PullbackIntegrand(d, R, p, rho=rho)
    return disk_integral(integrand, 1.0, 0.0, tol=tol, hint_degree=R.degree), "masked_pullback"


def theorem4_check(
    d: DomainMap,
    p: float,
    rho: float,
    R: RationalFunction,
    tol: float = None,
    bound_tol: float = None,
    seed: Optional[int] = None,
    extras: Optional[Dict[str, object]] = None,
) -> ExperimentRecord:
    """
    ||R'||_{A^p(G_rho)} <= n^(1/p) rho^(1/p - 1/q) M with 1/p + 1/q = 1

    measured and bound are the p-th roots; extras keep lhs_pow and rhs_pow.
    """
    start = time.perf_counter()
    if p <= 2.0:
        raise InadmissibleRegimeError("p > 2")
    if not 0.0 < rho < d.inradius:
        raise RhoOutOfRangeError(f"rho={rho:g} must lie in (0, {d.inradius:g}) for {d.describe()}")
    if not validate_poles_outside(d, R):
        raise PoleValidationError(f"a pole of R lies on the closure of {d.describe()}")
    n = R.degree
    M = boundary_sup(d, R)
    lhs, method = interior_integral(d, R, p, rho, tol)
    rhs_pow = n * rho ** (2.0 - p) * M ** p
    info = dict(extras or {})
    info.update(
        lhs_pow=lhs.value, rhs_pow=rhs_pow, sup=M, method=method, abs_error_estimate=lhs.abs_error_estimate,
        area_measure="dx dy / pi",
    )
    return make_record(
        "theorem4", n=n, p=p, rho=rho, domain=d.describe(), seed=seed, measured=lhs.value ** (1.0 / p),
        bound=rhs_pow ** (1.0 / p), bound_tol=bound_tol, converged=lhs.converged, wall_ms=_elapsed_ms(start),
        extras=info,
    )


def _theorem4_task(task: WTask) -> ExperimentRecord:
    R, _ = build_w_function(task)
    return theorem4_check(task.domain, task.p, task.rho, R, task.tol, task.bound_tol, task.seed,
                          {"family": task.family, "sample": task.sample})


# ---------------------------------------------------------------------------
# Theorem 5: weighted integrals I_{p,beta}


@dataclass(frozen=True)
class Theorem5Regime:
    regime: int
    model: GrowthModel
    exponent: float
    hypotheses: Tuple[str, ...] = field(default_factory=tuple)


def theorem5_regime(d: DomainMap, p: float, beta: float) -> Theorem5Regime:
    """
    Which weighted estimate applies to (p, beta) on d

    1: beta > p - 1 with phi' in H^gamma for some gamma > 1, bounded in n.
    2: beta = p - 1; (log n)^(1 - p/2) for 1 <= p < 2 (phi' in H^(2/(2-p))),
       bounded for p >= 2 (phi' in H^infinity, the disk among the kinds).
    3: p - 2 <= beta < p - 1 with p >= 2, n^(p - 1 - beta).
    """
    if p < 1.0:
        raise InadmissibleRegimeError("p >= 1")
    if beta < p - 2.0 - REGIME_EQUALITY_TOL:
        raise InadmissibleRegimeError("beta >= p - 2")
    _admissible_john(d)
    if beta > p - 1.0 + REGIME_EQUALITY_TOL:
        if hp_classification(d, REGIME1_HARDY_EXPONENT) != HpClass.FINITE:
            raise InadmissibleRegimeError("phi' in H^gamma for some gamma > 1")
        return Theorem5Regime(1, GrowthModel.CONSTANT, 0.0, ("beta > p - 1", "phi' in H^gamma, gamma > 1"))
    if abs(beta - (p - 1.0)) <= REGIME_EQUALITY_TOL:
        if p < 2.0:
            q = 2.0 / (2.0 - p)
            if not d.hp_finite(q):
                raise InadmissibleRegimeError(f"phi' in H^{q:g}")
            return Theorem5Regime(2, GrowthModel.LOG_POWER, 1.0 - p / 2.0, ("beta = p - 1", f"phi' in H^{q:g}"))
        if not isinstance(d, UnitDisk):
            raise InadmissibleRegimeError("phi' in H^infinity")
        return Theorem5Regime(2, GrowthModel.CONSTANT, 0.0, ("beta = p - 1", "phi' in H^infinity"))
    if p < 2.0:
        raise InadmissibleRegimeError("p >= 2 (1 <= p < 2 with p - 2 <= beta < p - 1 is open)")
    return Theorem5Regime(3, GrowthModel.POWER, p - 1.0 - beta, ("p - 2 <= beta < p - 1", "p >= 2"))


def theorem5_rate(regime: Theorem5Regime) -> Callable[[int], float]:
    if regime.model == GrowthModel.POWER:
        return lambda n: float(n) ** regime.exponent
    if regime.model == GrowthModel.LOG_POWER:
        return lambda n: math.log(n + 1.0) ** regime.exponent
    return lambda n: 1.0


def theorem5_scaling(
    d: DomainMap,
    p: float,
    beta: float,
    degrees: Sequence[int],
    family: str = "power_w_n",
    seed: Optional[int] = None,
    samples: int = 1,
    zero_law: str = "uniform_disk",
    band_delta: Optional[float] = None,
    j_grid: Sequence[int] = (),
    tol: float = None,
    bound_tol: float = None,
    jobs: int = 1,
) -> List[ExperimentRecord]:
    """
    I_{p,beta}(R) / M^p across degrees; the summary compares the fitted
    exponent on the regime's axes with the predicted one.

    Summary: measured = |fitted - predicted| exponent, bound = allowed deviation.
    """
    regime = theorem5_regime(d, p, beta)
    rate = theorem5_rate(regime)
    outcomes = _w_sweep(d, p, degrees, family, seed, samples, beta=beta, zero_law=zero_law,
                        band_delta=band_delta, j_grid=j_grid, tol=tol, jobs=jobs)
    records = _degree_records("theorem5", outcomes, d, p, beta, seed, family, rate, bound_tol)

    ns, worst = _worst_by_degree(outcomes)
    extras = {
        "regime": regime.regime,
        "predicted_model": regime.model.value,
        "predicted_exponent": regime.exponent,
        "hypotheses": list(regime.hypotheses),
    }
    if regime.model == GrowthModel.LOG_POWER:
        fit = _try_fit(ns + 1.0, worst, GrowthModel.LOG_POWER)
    else:
        fit = _try_fit(ns, worst, GrowthModel.POWER)
    if fit is None:
        records.append(make_record("theorem5", p=p, beta=beta, domain=d.describe(), seed=seed, extras=extras))
        return records

    classified, _ = classify_growth(ns, worst)
    extras.update(
        fitted_exponent=fit.slope,
        classified=classified.value,
        classification_matches=classified == regime.model,
    )
    records.append(
        make_record("theorem5", p=p, beta=beta, domain=d.describe(), seed=seed,
                    measured=abs(fit.slope - regime.exponent), bound=exponent_tolerance(regime.exponent),
                    bound_tol=bound_tol, fit=fit, extras=extras)
    )
    return records


# ---------------------------------------------------------------------------
# Open weighted inequality: exploratory only


def probe_open_peller(
    d: DomainMap,
    p: float,
    degrees: Sequence[int],
    family: str = "power_w_n",
    seed: Optional[int] = None,
    samples: int = 1,
    zero_law: str = "uniform_disk",
    band_delta: Optional[float] = None,
    tol: float = None,
    jobs: int = 1,
) -> List[ExperimentRecord]:
    """int_D |(R o phi)'|^p (1-|z|)^(p-2) dA / (n M^p) across degrees. Records are non-normative."""
    if not 1.0 < p < 2.0:
        raise InadmissibleRegimeError("1 < p < 2")
    _admissible_john(d)
    outcomes = _w_sweep(d, p, degrees, family, seed, samples, probe=True, zero_law=zero_law,
                        band_delta=band_delta, tol=tol, jobs=jobs)
    records = _degree_records("probe-peller", outcomes, d, p, p - 2.0, seed, family, float, None, normative=False)
    ns, worst = _worst_by_degree(outcomes)
    growth, running = running_growth(worst / ns)
    records.append(
        make_record(
            "probe-peller", p=p, beta=p - 2.0, domain=d.describe(), seed=seed,
            measured=running[-1] if running else None,
            extras={"normative": False, "running_max": running, "top_half_growth": growth,
                    "degrees": ns.astype(int).tolist()},
        )
    )
    return records


# ---------------------------------------------------------------------------
# Quadrature self-test against closed forms


def _oracle_row(name: str, measured: float, expected: float, tolerance: float) -> SelftestRow:
    error = abs(measured - expected)
    return SelftestRow(
        name=name, measured=float(measured), expected=float(expected), abs_error=float(error),
        tolerance=float(tolerance), passed=bool(error <= tolerance),
    )


def selftest(tol: float = None) -> List[SelftestRow]:
    """Quadrature results against closed-form values"""
    rows = []
    for n in (1, 16, 256):
        value = I_of(families.power_blaschke(n), tol).value
        rows.append(_oracle_row(f"i_of_power_{n}", value, 2.0 * n / (n + 1.0), 1e-7))
    a = 0.6
    value = I_of(blaschke.from_zeros([a]), tol).value
    rows.append(_oracle_row("i_of_single_factor_0.6", value, (1 - a * a) * -math.log(1 - a * a) / (a * a), 1e-6))

    integral, coefficient_sum = area_identity_check(ComplexPoly([1.0, 0.5, -0.25j, 0.125, 0.3 + 0.1j]), tol)
    rows.append(_oracle_row("area_identity", integral.value, coefficient_sum,
                            max(1e-8, integral.abs_error_estimate)))
    rows.append(_oracle_row("circle_mean_r0.75", circle_mean(ComplexPoly([0.0, 1.0]), 0.75, 1.0, tol).value,
                            0.75, 1e-10))
    rows.append(_oracle_row("weighted_beta_1", disk_integral(ComplexPoly([1.0]), 1.0, 1.0, tol=tol).value,
                            1.0 / 3.0, 1e-8))
    quartic = ComplexPoly([0.0, 0.0, 0.0, 0.0, 1.0])
    value = disk_integral(derivative(quartic), 3.0, 0.0, 0.0, 0.8, tol).value
    rows.append(_oracle_row("theorem4_disk_w4_p3_rho0.2", value, 2.0 * 64.0 * 0.8 ** 11 / 11.0, 1e-6))

    gammas = np.array([0.5, -0.3j, 0.2 + 0.1j])
    B = schur.reconstruct(schur.SchurParameters(gammas))
    recovered = schur.schur_parameters(taylor_coeffs(B, gammas.size - 1)).gammas
    rows.append(_oracle_row("schur_roundtrip", float(np.max(np.abs(recovered - gammas))), 0.0, 1e-10))

    square = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j])
    value = star_polygon_integral(lambda w: np.ones(np.shape(w)), square, tol).value
    rows.append(_oracle_row("polygon_area_square", value, 4.0 / math.pi, 1e-12))
    return rows


def selftest_records(tol: float = None) -> List[ExperimentRecord]:
    records = []
    for row in selftest(tol):
        records.append(
            make_record(f"selftest.{row.name}", measured=row.abs_error, bound=row.tolerance, bound_tol=0.0,
                        extras={"value": row.measured, "expected": row.expected})
        )
    return records


# ---------------------------------------------------------------------------
# registry


def _degrees_from(params: ExperimentParameters) -> List[int]:
    return sorted(set(params.degrees))


def _run_theorem1(params: ExperimentParameters, jobs: int) -> List[ExperimentRecord]:
    return verify_theorem1_upper(_degrees_from(params), params.samples, params.zero_law, params.seed,
                                 params.band_delta, params.tol, params.bound_tol, jobs)


def _run_lower_bound(params: ExperimentParameters, jobs: int) -> List[ExperimentRecord]:
    return lower_bound_sweep(sorted(set(params.j_max)), params.strategy, params.sign_randomization, params.seed,
                             params.samples, params.taylor_count, params.tol, jobs)


def _run_lemma1(params: ExperimentParameters, jobs: int) -> List[ExperimentRecord]:
    n_grid = [n for n in _degrees_from(params) if n >= 2]
    skipped = [n for n in params.degrees if n < 2]
    if skipped:
        logger.warning(f"lemma1 skips degrees {skipped}: the disk 1 - 2 log n / n is empty")
    tasks = [(name, n_grid, params.seed, params.bound_tol) for name in params.g_family]
    return [record for chunk in run_tasks(_lemma1_task, tasks, jobs) for record in chunk]


def _run_lemma2(params: ExperimentParameters, jobs: int) -> List[ExperimentRecord]:
    if params.seed is None:
        raise ConfigError("lemma2 draws random Blaschke products and needs a seed", field="seed")
    tasks = []
    for n in _degrees_from(params):
        tasks.append((len(tasks), n, "power", params.zero_law, params.seed, params.r_grid, params.tol,
                      params.bound_tol))
        for _ in range(params.samples):
            tasks.append((len(tasks), n, "random", params.zero_law, params.seed, params.r_grid, params.tol,
                          params.bound_tol))
    return run_tasks(_lemma2_task, tasks, jobs)


def _run_dolzhenko(params: ExperimentParameters, jobs: int) -> List[ExperimentRecord]:
    return dolzhenko_scaling(params.domain.build(), params.p, _degrees_from(params), params.family, params.seed,
                             params.samples, params.zero_law, params.band_delta, params.tol, params.bound_tol, jobs)


def _run_theorem3(params: ExperimentParameters, jobs: int) -> List[ExperimentRecord]:
    d = params.domain.build()
    j_grid = sorted(set(params.j_max)) if isinstance(d, UnitDisk) else []
    return theorem3_scaling(d, _degrees_from(params), params.family, params.seed, params.samples,
                            params.zero_law, params.band_delta, j_grid, params.tol, params.bound_tol, jobs)


def _run_theorem4(params: ExperimentParameters, jobs: int) -> List[ExperimentRecord]:
    if params.rho is None:
        raise ConfigError("theorem4 needs rho", field="rho")
    if params.family == "banuelos_moore":
        raise ConfigError("theorem4 takes a w-plane family", field="family")
    if params.family == "random_blaschke_in_w" and params.seed is None:
        raise ConfigError("family 'random_blaschke_in_w' needs a seed", field="seed")
    d = params.domain.build()
    if params.p <= 2.0:
        raise InadmissibleRegimeError("p > 2")
    if not 0.0 < params.rho < d.inradius:
        raise RhoOutOfRangeError(f"rho={params.rho:g} must lie in (0, {d.inradius:g}) for {d.describe()}")
    repeats = params.samples if params.family == "random_blaschke_in_w" else 1
    tasks = []
    for n in _degrees_from(params):
        for s in range(repeats):
            tasks.append(WTask(index=len(tasks), n=n, sample=s, domain=d, family=params.family, p=params.p,
                               rho=params.rho, seed=params.seed, zero_law=params.zero_law,
                               band_delta=params.band_delta, tol=params.tol, bound_tol=params.bound_tol))
    return run_tasks(_theorem4_task, tasks, jobs)


def _run_theorem5(params: ExperimentParameters, jobs: int) -> List[ExperimentRecord]:
    return theorem5_scaling(params.domain.build(), params.p, params.beta, _degrees_from(params), params.family,
                            params.seed, params.samples, params.zero_law, params.band_delta,
                            sorted(set(params.j_max)), params.tol, params.bound_tol, jobs)


def _run_probe(params: ExperimentParameters, jobs: int) -> List[ExperimentRecord]:
    return probe_open_peller(params.domain.build(), params.p, _degrees_from(params), params.family, params.seed,
                             params.samples, params.zero_law, params.band_delta, params.tol, jobs)


def _run_selftest(params: ExperimentParameters, jobs: int) -> List[ExperimentRecord]:
    return selftest_records(params.tol)


def requires_seed(experiment: str, parameters: ExperimentParameters) -> bool:
    """Whether the configured run draws random numbers"""
    if experiment in ("verify-theorem1", "lemma2"):
        return True
    if experiment == "lemma1":
        return "scaled_blaschke" in parameters.g_family
    if experiment == "lower-bound":
        return parameters.sign_randomization or parameters.strategy != "rudin_shapiro_scaled"
    if experiment in ("dolzhenko", "theorem3", "theorem4", "theorem5", "probe-peller"):
        return parameters.family == "random_blaschke_in_w"
    return False


@dataclass(frozen=True)
class ExperimentEntry:
    name: str
    description: str
    randomized: str
    driver: Callable[[ExperimentParameters, int], List[ExperimentRecord]]


EXPERIMENTS: Dict[str, ExperimentEntry] = {
    entry.name: entry
    for entry in (
        ExperimentEntry("verify-theorem1", "I(B) <= pi(1 + sqrt(log n)) over random Blaschke products",
                        "always", _run_theorem1),
        ExperimentEntry("lower-bound", "Bañuelos–Moore construction and I(B)/sqrt(log m)",
                        "strategy-dependent", _run_lower_bound),
        ExperimentEntry("lemma1", "Truncations of Schur-class functions on |z| <= 1 - 2 log n / n",
                        "family-dependent", _run_lemma1),
        ExperimentEntry("lemma2", "Circle means of |B'|^2 against n/(1-r)", "always", _run_lemma2),
        ExperimentEntry("dolzhenko", "int_G |R'|^p dA against n^(p-1) or log(n+1)", "family-dependent",
                        _run_dolzhenko),
        ExperimentEntry("theorem3", "int_G |R'| dA against sqrt(log(n+1)) for phi' in H^2", "family-dependent",
                        _run_theorem3),
        ExperimentEntry("theorem4", "A^p norm of R' on G_rho against n^(1/p) rho^(1/p-1/q) M", "family-dependent",
                        _run_theorem4),
        ExperimentEntry("theorem5", "Weighted integrals I_{p,beta} and their growth regime", "family-dependent",
                        _run_theorem5),
        ExperimentEntry("probe-peller", "Exploratory ratio for the open weighted inequality (non-normative)",
                        "family-dependent", _run_probe),
        ExperimentEntry("selftest", "Quadrature against closed-form oracles", "never", _run_selftest),
    )
}
