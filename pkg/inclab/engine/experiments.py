"""Exponent surface, slope fits, δ-sweeps and empirical checks of the upper-bound exponents."""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from inclab.core.error_codes import BusinessException, ErrorCode
from inclab.engine.constructions import construct, furstenberg_config, furstenberg_product
from inclab.engine.geometry import Scale
from inclab.engine.incidence import count, resolve_threads
from inclab.engine.spacing import ball_profile_dyadic, tube_profile
from inclab.engine.sumproduct import (
    ap_set,
    build_instance,
    cantor_set,
    sumproduct_exponents,
    verify_instance,
)


logger = logging.getLogger(__name__)

MIN_FIT_ROWS = 4
SLOPE_MARGIN = 0.1
FURSTENBERG_MARGIN = 0.15
PRODUCT_MARGIN = 0.05


def _check_domain(alpha: float, beta: float) -> None:
    if not (0.0 <= alpha <= 2.0 and 0.0 <= beta <= 2.0):
        raise BusinessException(ErrorCode.INVALID_EXPONENT, f"(α, β)=({alpha}, {beta}) outside [0, 2]²")


def f_surface(alpha: float, beta: float) -> float:
    """Sharp incidence exponent: I ≈ D^{f(α, β)}."""
    _check_domain(alpha, beta)
    if alpha >= beta + 1:
        return beta + 1
    if beta >= alpha + 1:
        return alpha + 1
    if alpha + beta >= 3:
        return alpha + beta - 1
    a, b = min(alpha, 1.0), min(beta, 1.0)
    if a + b == 0:
        return 0.0
    return (a * alpha + b * beta + a * b) / (a + b)


def surface_region(alpha: float, beta: float) -> str:
    _check_domain(alpha, beta)
    if alpha == 0 and beta == 0:
        return "trivial"
    if alpha >= beta + 1:
        return "fan"
    if beta >= alpha + 1:
        return "columns"
    if alpha + beta >= 3:
        return "cone"
    return "bundle"


def surface_grid(n: int) -> list[dict]:
    """f over an n × n grid of [0, 2]², row-major in α."""
    if n < 2:
        raise BusinessException(ErrorCode.INVALID_INPUT, f"grid needs n >= 2, got {n}")
    axis = np.linspace(0.0, 2.0, n)
    return [
        {"alpha": float(a), "beta": float(b), "f": f_surface(a, b), "region": surface_region(a, b)}
        for a in axis for b in axis
    ]


def theorem_exponents(alpha: float, beta: float) -> dict:
    """
    Upper-bound exponents for |P| = D^β, |T| = D^α with unit spacing constants.

    Keys present only when the corresponding bound applies.
    """
    _check_domain(alpha, beta)
    a, b = min(alpha, 1.0), min(beta, 1.0)
    c = 1.0 / max(alpha + beta - 1, 2.0)
    out = {"c": c, "general": c + (1 - c) * (alpha + beta)}
    if b >= alpha and alpha + b > 0:
        out["balls_dominate"] = (alpha * b + b * beta + alpha * alpha) / (alpha + b)
    if a >= beta and a + beta > 0:
        out["tubes_dominate"] = (a * beta + beta * beta + a * alpha) / (a + beta)
    return out


def furstenberg_exponent(u: float, v: float) -> float:
    return min(2 * u + v - 1, u + 1)


@dataclass
class FitResult:
    slope: float
    intercept: float
    r2: float


def fit_slope(ks: Sequence[int], values: Sequence[float]) -> FitResult:
    """Least squares of log₂ value against k."""
    ks = np.asarray(ks, dtype=float)
    values = np.asarray(values, dtype=float)
    if ks.size < MIN_FIT_ROWS:
        raise BusinessException(ErrorCode.TOO_FEW_ROWS, f"{ks.size} rows")
    if np.any(np.diff(ks) <= 0):
        raise BusinessException(ErrorCode.INVALID_INPUT, "k must be strictly increasing")
    if np.any(values <= 0):
        raise BusinessException(ErrorCode.INVALID_INPUT, "values must be positive to take log₂")
    logs = np.log2(values)
    slope, intercept = np.polyfit(ks, logs, 1)
    residual = logs - (slope * ks + intercept)
    total = np.sum((logs - logs.mean()) ** 2)
    r2 = 1.0 if total == 0 else 1.0 - float(np.sum(residual ** 2)) / float(total)
    return FitResult(float(slope), float(intercept), r2)


@dataclass
class BoundReport:
    """I / RHS for every applicable upper bound, unit constants."""

    ratios: dict[str, float]
    rhs: dict[str, float]


def check_upper(incidences: int, n_balls: int, n_tubes: int, K_alpha: float, K_beta: float,
                alpha: float, beta: float, D: int) -> BoundReport:
    _check_domain(alpha, beta)
    a, b = min(alpha, 1.0), min(beta, 1.0)
    K_alpha, K_beta = max(K_alpha, 1.0), max(K_beta, 1.0)
    P, T = max(n_balls, 1), max(n_tubes, 1)
    rhs = {}
    if b >= alpha and alpha + b > 0:
        log_rhs = (alpha * b * math.log2(D) + alpha * math.log2(K_beta) + b * math.log2(K_alpha)
                   + b * math.log2(P) + alpha * math.log2(T)) / (alpha + b)
        rhs["balls_dominate"] = 2.0 ** log_rhs
    if a >= beta and a + beta > 0:
        log_rhs = (a * beta * math.log2(D) + a * math.log2(K_beta) + beta * math.log2(K_alpha)
                   + beta * math.log2(P) + a * math.log2(T)) / (a + beta)
        rhs["tubes_dominate"] = 2.0 ** log_rhs
    if alpha >= 1 and beta >= 1:
        c = 1.0 / max(alpha + beta - 1, 2.0)
        rhs["general"] = D ** c * (K_alpha * K_beta) ** c * (P * T) ** (1 - c)
    ratios = {name: incidences / value for name, value in rhs.items()}
    return BoundReport(ratios, rhs)


@dataclass
class SweepRow:
    k: int
    D: int
    alpha: float
    beta: float
    n_balls: int
    n_tubes: int
    I: int
    K_alpha_meas: float
    K_beta_meas: float
    seconds: float
    bound_ratios: dict = field(default_factory=dict)


@dataclass
class SweepResult:
    construction: int
    alpha: float
    beta: float
    rows: list[SweepRow]
    fit: FitResult
    predicted: float
    bound_slopes: dict[str, float] = field(default_factory=dict)
    overrides: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if abs(self.fit.slope - self.predicted) > SLOPE_MARGIN:
            return False
        return all(slope <= SLOPE_MARGIN for slope in self.bound_slopes.values())


def _sweep_point(construction: int, alpha: float, beta: float, k: int, method: str,
                 profiles: bool, overrides: dict) -> SweepRow:
    start = time.perf_counter()
    config = construct(construction, k, alpha, beta, **overrides)
    report = count(config, method, threads=1)
    K_alpha = K_beta = float("nan")
    ratios = {}
    if profiles:
        K_beta = ball_profile_dyadic(config.ball_centers, config.scale, beta).K
        K_alpha = tube_profile(config.tube_params, config.scale, alpha).K
        ratios = check_upper(
            report.total, config.n_balls, config.n_tubes, K_alpha, K_beta, alpha, beta, config.scale.D
        ).ratios
    seconds = time.perf_counter() - start
    logger.debug("sweep point c=%d k=%d I=%d %.2fs", construction, k, report.total, seconds)
    return SweepRow(k, config.scale.D, alpha, beta, config.n_balls, config.n_tubes, report.total,
                    K_alpha, K_beta, seconds, ratios)


def sweep(construction: int, alpha: float, beta: float, k_min: int, k_max: int, method: str = "grid",
          profiles: bool = True, threads: Optional[int] = None, **overrides) -> SweepResult:
    """Generate, count and fit log₂ I against k; k-points run concurrently."""
    if k_max - k_min + 1 < MIN_FIT_ROWS:
        raise BusinessException(ErrorCode.TOO_FEW_ROWS, f"k range {k_min}..{k_max}")
    for k in (k_min, k_max):
        Scale(k)
    overrides = {key: value for key, value in overrides.items() if value is not None}
    ks = list(range(k_min, k_max + 1))
    with ThreadPoolExecutor(max_workers=resolve_threads(threads)) as pool:
        rows = list(pool.map(
            lambda k: _sweep_point(construction, alpha, beta, k, method, profiles, overrides), ks
        ))
    rows.sort(key=lambda row: row.k)
    fit = fit_slope([r.k for r in rows], [max(r.I, 1) for r in rows])
    bound_slopes = {}
    if profiles:
        for name in rows[0].bound_ratios:
            bound_slopes[name] = fit_slope([r.k for r in rows], [r.bound_ratios[name] for r in rows]).slope
    result = SweepResult(int(construction), alpha, beta, rows, fit, f_surface(alpha, beta), bound_slopes, overrides)
    logger.info(
        "sweep c=%d α=%.3f β=%.3f k=%d..%d slope=%.4f predicted=%.4f passed=%s",
        construction, alpha, beta, k_min, k_max, fit.slope, result.predicted, result.passed,
    )
    return result


@dataclass
class FurstenbergRow:
    k: int
    n_tubes: int
    n_balls: int
    sum_pt: int
    max_pt_K: float
    general_ratio: float


@dataclass
class FurstenbergReport:
    u: float
    v: float
    bound: float
    rows: list[FurstenbergRow]
    fit: FitResult
    product_fit: Optional[FitResult] = None

    @property
    def passed(self) -> bool:
        if self.fit.slope < self.bound - FURSTENBERG_MARGIN:
            return False
        if self.product_fit is not None and abs(self.product_fit.slope - (self.u + 1)) > PRODUCT_MARGIN:
            return False
        return True


def furstenberg_check(u: float, v: float, k_min: int, k_max: int, sample_tubes: int = 16) -> FurstenbergReport:
    """
    Sweep furstenberg_config and fit log₂|P|; for u + v ≥ 2 also fit the product set.

    Each row records Σ|P_t|, the worst ball spacing constant over sampled P_t
    and the ratio of Σ|P_t| to the general Furstenberg incidence bound.
    """
    if not (0.0 < u <= 1.0 and 1.0 <= v <= 2.0):
        raise BusinessException(ErrorCode.REGION_VIOLATION, f"furstenberg needs 0<u<=1<=v<=2; got ({u}, {v})")
    rows = []
    for k in range(k_min, k_max + 1):
        fc = furstenberg_config(k, u, v)
        sizes = np.array([m.size for m in fc.members])
        picks = np.unique(np.linspace(0, len(fc.members) - 1, min(sample_tubes, len(fc.members))).astype(int))
        worst = max(ball_profile_dyadic(fc.ball_centers[fc.members[i]], fc.scale, u).K for i in picks)
        c = 1.0 / max(u + v, 2.0)
        n_t = len(fc.members)
        rhs = fc.scale.D ** c * worst ** c * (fc.n_balls ** (1 - c)) * (n_t ** (1 - c))
        rows.append(FurstenbergRow(k, n_t, fc.n_balls, int(sizes.sum()), worst, float(sizes.sum()) / rhs))
    fit = fit_slope([r.k for r in rows], [r.n_balls for r in rows])
    product_fit = None
    if u + v >= 2:
        ks = list(range(k_min, k_max + 1))
        product_fit = fit_slope(ks, [furstenberg_product(k, u).n_balls for k in ks])
    report = FurstenbergReport(u, v, furstenberg_exponent(u, v), rows, fit, product_fit)
    logger.info("furstenberg u=%.3f v=%.3f slope=%.4f bound=%.4f passed=%s", u, v, fit.slope, report.bound, report.passed)
    return report


@dataclass
class SumProductRow:
    k: int
    n_A: int
    n_B: int
    n_C: int
    n_X: int
    n_Y: int
    lhs: int
    rhs: float


@dataclass
class SumProductSweep:
    kind: str
    s: float
    rows: list[SumProductRow]
    lhs_fit: FitResult
    rhs_fit: FitResult
    predicted: float

    @property
    def passed(self) -> bool:
        return self.lhs_fit.slope >= self.rhs_fit.slope - SLOPE_MARGIN


def sumproduct_inputs(kind: str, k: int, s: float = 1.0):
    if kind == "ap":
        values = ap_set(k)
    elif kind == "cantor":
        values = cantor_set(k, s)
    else:
        raise BusinessException(ErrorCode.INVALID_INPUT, f"unknown sum-product instance {kind!r}")
    return values, values.copy(), values.copy()


def sumproduct_sweep(kind: str, k_min: int, k_max: int, s: float = 1.0) -> SumProductSweep:
    s = 1.0 if kind == "ap" else s
    rows = []
    for k in range(k_min, k_max + 1):
        A, B, C = sumproduct_inputs(kind, k, s)
        inst = build_instance(k, A, B, C, u=s, v=s, v_prime=s)
        report = verify_instance(inst, structural=False)
        rows.append(SumProductRow(k, A.size, B.size, C.size, inst.n_sum_cover, inst.n_product_cover,
                                  report.lhs, report.rhs))
    ks = [r.k for r in rows]
    result = SumProductSweep(
        kind, s, rows, fit_slope(ks, [r.lhs for r in rows]), fit_slope(ks, [r.rhs for r in rows]),
        sumproduct_exponents(s, s, s)["exponent"],
    )
    logger.info("sumproduct sweep %s s=%.3f lhs=%.4f rhs=%.4f", kind, s, result.lhs_fit.slope, result.rhs_fit.slope)
    return result
