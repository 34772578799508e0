"""Discretized sum-product instances: covers of A+B and A·C, the product ball set and the tubes t_bc."""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from inclab.core.error_codes import BusinessException, ErrorCode
from inclab.engine.cantor import cantor_generate
from inclab.engine.geometry import Configuration, Scale, ball_tube_distance
from inclab.engine.incidence import count_grid
from inclab.engine.spacing import ball_profile_dyadic, interval_profile_dyadic


logger = logging.getLogger(__name__)

# Window [1, 4]² maps into the unit square by (z − 1) / FRAME_SHRINK.
FRAME_SHRINK = 4.0
TUBE_CENTER_X = 3.0
TUBE_LENGTH = 5.0
_COVER_EPS = 1e-12


def ap_set(k: int) -> np.ndarray:
    """Centers 1 + (2j+1)δ in [1, 2]: a maximal 2δ-spaced progression."""
    scale = Scale(k)
    return 1.0 + (2 * np.arange(scale.D // 2) + 1) * scale.delta


def cantor_set(k: int, s: float) -> np.ndarray:
    """Centers 1 + (2m+1)δ over the Cantor points m of level k−1, kept inside [1, 2]."""
    scale = Scale(k)
    base = np.asarray(cantor_generate(k - 1, s).points, dtype=float)
    centers = 1.0 + (2 * base + 1) * scale.delta
    return centers[centers <= 2.0 + _COVER_EPS]


def greedy_cover(values, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Minimal cover of points on a line by closed intervals of length 2δ.

    Returns:
        (centers, assignment) where assignment[i] is the cover interval holding values[i].
    """
    values = np.asarray(values, float).ravel()
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    centers = []
    assignment_sorted = np.empty(values.size, np.int64)
    i = 0
    while i < sorted_vals.size:
        start = sorted_vals[i]
        stop = np.searchsorted(sorted_vals, start + 2 * delta + _COVER_EPS, "right")
        assignment_sorted[i:stop] = len(centers)
        centers.append(start + delta)
        i = stop
    assignment = np.empty(values.size, np.int64)
    assignment[order] = assignment_sorted
    return np.asarray(centers, float), assignment


def min_cover_size(values, delta: float) -> int:
    """Exhaustive dynamic program over which leading points the next interval covers."""
    vals = np.unique(np.asarray(values, float).ravel())
    n = vals.size
    best = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        reach = int(np.searchsorted(vals, vals[i] + 2 * delta + _COVER_EPS, "right"))
        best[i] = 1 + min(best[j] for j in range(i + 1, reach + 1))
    return best[0]


def _check_inputs(name: str, values: np.ndarray, delta: float) -> np.ndarray:
    values = np.sort(np.asarray(values, float).ravel())
    if values.size == 0:
        raise BusinessException(ErrorCode.INVALID_INPUT, f"{name} is empty")
    if values[0] < 1.0 - _COVER_EPS or values[-1] > 2.0 + _COVER_EPS:
        raise BusinessException(ErrorCode.INVALID_INPUT, f"{name} must lie in [1, 2]")
    if values.size > 1 and np.min(np.diff(values)) < 2 * delta - _COVER_EPS:
        raise BusinessException(ErrorCode.NOT_DISJOINT, f"{name} has centers closer than 2δ")
    return values


def sumproduct_exponents(u: float, v: float, v_prime: float) -> dict:
    """c, the common weight c/(2(1−c)) and the D-exponent of the lower bound for |A|=D^u, |B|=D^v, |C|=D^v′."""
    c = 1.0 / max(u + v + v_prime, 2.0)
    weight = c / (2 * (1 - c))
    exponent = -weight + weight * v + weight * v_prime + u / (2 * (1 - c))
    return {"c": c, "weight": weight, "exponent": exponent}


@dataclass
class SumProductInstance:
    scale: Scale
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    sum_index: np.ndarray
    product_index: np.ndarray
    config: Configuration
    K_u: float
    K_v: float
    u: float
    v: float
    v_prime: float
    meta: dict = field(default_factory=dict)

    @property
    def n_sum_cover(self) -> int:
        return int(self.X.size)

    @property
    def n_product_cover(self) -> int:
        return int(self.Y.size)

    def to_frame(self, xy: np.ndarray) -> np.ndarray:
        return (np.asarray(xy, float) - 1.0) / FRAME_SHRINK

    def family(self, ib: int, ic: int) -> np.ndarray:
        """Indices into F of F_bc = {(X̃(a+b), Ỹ(a·c)) : a ∈ A}."""
        fx = self.sum_index[:, ib]
        fy = self.product_index[:, ic]
        return np.unique(fx * self.Y.size + fy)


def build_instance(k: int, A, B, C, u: Optional[float] = None, v: Optional[float] = None,
                   v_prime: Optional[float] = None) -> SumProductInstance:
    """
    Product ball set F = X̃ × Ỹ and one tube t_bc per (b, c).

    Everything is mapped into the unit square by (z − 1)/4, so the
    configuration lives at scale δ/4 with tubes of length 5/4.
    """
    scale = Scale(k)
    delta = scale.delta
    A, B, C = (_check_inputs(name, vals, delta) for name, vals in (("A", A), ("B", B), ("C", C)))

    K_u_profile = interval_profile_dyadic(A - 1.0, scale, u if u is not None else 1.0)
    K_v_profile = interval_profile_dyadic(B - 1.0, scale, v if v is not None else 1.0)
    u = 1.0 if u is None else float(u)
    v = 1.0 if v is None else float(v)
    v_prime = 1.0 if v_prime is None else float(v_prime)
    if v + v_prime <= 1.0:
        raise BusinessException(ErrorCode.INVALID_EXPONENT, f"need v + v′ > 1, got {v} + {v_prime}")

    sums = A[:, None] + B[None, :]
    products = A[:, None] * C[None, :]
    X, sum_assign = greedy_cover(sums.ravel(), delta)
    Y, product_assign = greedy_cover(products.ravel(), delta)

    gx, gy = np.meshgrid(X, Y, indexing="ij")
    frame_scale = Scale(k + 2)
    balls = (np.stack([gx.ravel(), gy.ravel()], axis=1) - 1.0) / FRAME_SHRINK
    bb, cc = np.meshgrid(B, C, indexing="ij")
    bb, cc = bb.ravel(), cc.ravel()
    tubes = np.stack([
        np.full(bb.size, (TUBE_CENTER_X - 1.0) / FRAME_SHRINK),
        (cc * (TUBE_CENTER_X - bb) - 1.0) / FRAME_SHRINK,
        np.arctan(cc),
    ], axis=1)
    config = Configuration.at_scale(
        frame_scale, balls, tubes,
        {"construction": "sumproduct", "frame": "(z - 1) / 4", "window": [1.0, 4.0], "base_k": k},
        tube_length=TUBE_LENGTH / FRAME_SHRINK,
    )
    config.check_size()
    logger.info("sumproduct k=%d |A|=%d |B|=%d |C|=%d |X|=%d |Y|=%d", k, A.size, B.size, C.size, X.size, Y.size)
    return SumProductInstance(
        scale, A, B, C, X, Y,
        sum_assign.reshape(A.size, B.size), product_assign.reshape(A.size, C.size),
        config, K_u_profile.K, K_v_profile.K, u, v, v_prime,
        {"tube_pairs": "row-major over (b, c)"},
    )


@dataclass
class SumProductReport:
    n_tubes_ok: bool
    size_ok: bool
    families_meet_tubes: Optional[bool]
    max_cover_distance: Optional[float]
    max_family_K: Optional[float]
    family_K_bound: float
    lhs: int
    rhs: float
    ratio: float
    incidences: Optional[int] = None
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        flags = [self.n_tubes_ok, self.size_ok, self.families_meet_tubes]
        if self.max_cover_distance is not None:
            flags.append(self.max_cover_distance < 1.5)
        if self.max_family_K is not None:
            flags.append(self.max_family_K <= self.family_K_bound)
        return all(flag is not False for flag in flags)


def rhs_value(inst: SumProductInstance) -> float:
    """Lower bound for max(|A+B|_δ, |A·C|_δ) with unit constant."""
    exps = sumproduct_exponents(inst.u, inst.v, inst.v_prime)
    weight, c = exps["weight"], exps["c"]
    D = float(inst.scale.D)
    return (
        (inst.K_u * inst.K_v * D) ** (-weight)
        * (inst.B.size * inst.C.size) ** weight
        * inst.A.size ** (1.0 / (2 * (1 - c)))
    )


def verify_instance(inst: SumProductInstance, structural: bool = True) -> SumProductReport:
    """
    Exact structural checks and the size inequality.

    Cover distances are reported in units of δ. With structural=False only the
    sizes, the tube count and the bound are evaluated.
    """
    delta = inst.scale.delta
    config = inst.config
    lhs = max(inst.n_sum_cover, inst.n_product_cover)
    rhs = rhs_value(inst)
    size_ok = config.n_balls == inst.n_sum_cover * inst.n_product_cover
    n_tubes_ok = config.n_tubes == inst.B.size * inst.C.size
    bound = 4 * 64 * inst.K_u
    report = SumProductReport(n_tubes_ok, size_ok, None, None, None, bound, lhs, rhs, lhs / rhs)
    if not structural:
        return report

    dx = inst.X[inst.sum_index] - (inst.A[:, None] + inst.B[None, :])
    dy = inst.Y[inst.product_index] - (inst.A[:, None] * inst.C[None, :])
    worst = math.hypot(float(np.max(np.abs(dx))), float(np.max(np.abs(dy))))
    report.max_cover_distance = worst / delta

    frame = Scale(inst.scale.k + 2)
    meets, family_K = True, 0.0
    for ib in range(inst.B.size):
        for ic in range(inst.C.size):
            members = inst.family(ib, ic)
            t = config.tube_params[ib * inst.C.size + ic]
            pts = config.ball_centers[members]
            dist = ball_tube_distance(pts[:, 0], pts[:, 1], t[0], t[1], t[2], config.tube_width, config.tube_length)
            if np.any(dist > config.ball_radius * (1.0 + 1e-12)):
                meets = False
            family_K = max(family_K, ball_profile_dyadic(pts, frame, inst.u).K)
    report.families_meet_tubes = meets
    report.max_family_K = family_K
    report.incidences = count_grid(config).total
    report.checks = {"tubes_times_A": int(config.n_tubes * inst.A.size)}
    logger.info("sumproduct verify k=%d lhs=%d rhs=%.4g ok=%s", inst.scale.k, lhs, rhs, report.ok)
    return report
