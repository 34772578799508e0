"""Extremal ball/tube configurations, Furstenberg configurations and regularization."""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from inclab.core.error_codes import BusinessException, ErrorCode
from inclab.engine.cantor import build_Pw, cantor_generate
from inclab.engine.geometry import HALF_PI, Configuration, Scale
from inclab.engine.spacing import dyadic_count_tree


logger = logging.getLogger(__name__)

_EPS = 1e-9

# Fans of Constructions 2 and 4 span at most this angle.
FAN_ANGLE = 0.25
FAN_STEP_FACTOR = 3
# Construction 3 ball columns are at least this many δ apart.
MIN_COLUMN_PITCH = 2


def _floor_pow(D: int, exponent: float) -> int:
    return int(math.floor(D ** exponent + _EPS))


def _check_unit_square(alpha: float, beta: float) -> None:
    if not (0.0 <= alpha <= 2.0 and 0.0 <= beta <= 2.0):
        raise BusinessException(ErrorCode.REGION_VIOLATION, f"(α, β)=({alpha}, {beta}) outside [0, 2]²")


def _min_k(k: int, minimum: int = 4) -> Scale:
    scale = Scale(k)
    if k < minimum:
        raise BusinessException(ErrorCode.INVALID_SCALE, f"k={k}, constructions need k >= {minimum}")
    return scale


@dataclass(frozen=True)
class Construction1Params:
    """Derived exponents of the bundle construction; lam overrides the certified λ."""

    alpha: float
    beta: float
    lam_override: Optional[float] = None

    @classmethod
    def from_exponents(cls, alpha: float, beta: float, lam: Optional[float] = None) -> "Construction1Params":
        _check_unit_square(alpha, beta)
        if not (alpha < beta + 1 and beta < alpha + 1 and alpha + beta < 3):
            raise BusinessException(
                ErrorCode.REGION_VIOLATION, f"construction 1 needs α<β+1, β<α+1, α+β<3; got ({alpha}, {beta})"
            )
        params = cls(float(alpha), float(beta), None if lam is None else float(lam))
        if lam is not None and not 0.0 <= lam <= 1.0:
            raise BusinessException(ErrorCode.INVALID_INPUT, f"λ={lam} not in [0, 1]")
        return params

    @property
    def a(self) -> float:
        return min(self.alpha, 1.0)

    @property
    def b(self) -> float:
        return min(self.beta, 1.0)

    @property
    def gamma(self) -> float:
        if self.a + self.b == 0:
            return 0.0
        return (self.a - self.alpha + self.beta) / (self.a + self.b)

    @property
    def kappa(self) -> float:
        if self.a + self.b == 0:
            return 0.0
        return (self.a * self.beta + self.b * self.alpha - self.a * self.b) / (self.a + self.b)

    @property
    def lam(self) -> float:
        if self.lam_override is not None:
            return self.lam_override
        return min(self.gamma, 1.0 - self.gamma)


def lambda_conditions(params: Construction1Params, tol: float = 1e-12) -> list[bool]:
    """
    The four defining inequalities for λ, in order.

    The ball-side inequality mirrors the tube side under α ↔ β, which swaps
    γ and 1 − γ; the third compares against max(λ, 1−λ)·κ.
    """
    a, b, g, kappa, lam = params.a, params.b, params.gamma, params.kappa, params.lam
    spread = max(lam, 1.0 - lam)
    return [
        (1 - g) * a * (a + 1 - params.alpha) + spread * kappa <= a + tol,
        g * b * (b + 1 - params.beta) + spread * kappa <= b + tol,
        g + (1 - g) * min(a, b) >= spread * kappa - tol,
        -tol <= lam <= min(g, 1 - g) + tol,
    ]


def construct1(k: int, alpha: float, beta: float, lam: Optional[float] = None) -> Configuration:
    """
    Grid of bundles: each is a fan of tubes through a common center plus balls on its axis.

    Fan steps are at least FAN_STEP_FACTOR·δ, so fan neighbours share under half
    their area. Ball centers lie within 3δ/4 of every fan tube's midline, so every
    ball of a bundle meets every tube of that bundle.
    """
    scale = _min_k(k)
    params = Construction1Params.from_exponents(alpha, beta, lam)
    D, delta = scale.D, scale.delta
    a, b, g, kappa = params.a, params.b, params.gamma, params.kappa

    n_bundles = max(1, _floor_pow(D, kappa))
    n_rows = min(n_bundles, max(1, int(round(D ** (params.lam * kappa)))))
    n_cols = math.ceil(n_bundles / n_rows)
    n_t = max(1, _floor_pow(D, (1 - g) * a))
    n_b = max(1, _floor_pow(D, g * b))
    fan_step = max(delta ** (g + (1 - g) * a), FAN_STEP_FACTOR * delta)
    ball_step = delta ** (1 - g + g * b)

    fan = (np.arange(n_t) - (n_t - 1) / 2) * fan_step
    along = (np.arange(n_b) - (n_b - 1) / 2) * ball_step
    tubes, balls = [], []
    for idx in range(n_bundles):
        row, col = divmod(idx, n_cols)
        cx, cy = (col + 0.5) / n_cols, (row + 0.5) / n_rows
        axis = HALF_PI + (row - (n_rows - 1) / 2) / n_rows
        tubes.append(np.stack([np.full(n_t, cx), np.full(n_t, cy), axis + fan], axis=1))
        balls.append(np.stack([cx + along * math.cos(axis), cy + along * math.sin(axis)], axis=1))

    meta = {
        "construction": 1, "alpha": alpha, "beta": beta,
        "a": a, "b": b, "gamma": g, "kappa": kappa, "lambda": params.lam,
        "n_bundles": n_bundles, "n_rows": n_rows, "n_cols": n_cols,
        "tubes_per_bundle": n_t, "balls_per_bundle": n_b,
        "fan_step": fan_step, "ball_step": ball_step,
    }
    config = Configuration.at_scale(scale, np.concatenate(balls), np.concatenate(tubes), meta)
    config.check_size()
    logger.info("construct1 k=%d α=%.3f β=%.3f |P|=%d |T|=%d", k, alpha, beta, config.n_balls, config.n_tubes)
    return config


def _fan_bundles(scale: Scale, alpha: float) -> tuple[np.ndarray, np.ndarray, int]:
    """Bundle centers on the central segment and the (n_bundles·m, 3) fan tubes."""
    D, delta = scale.D, scale.delta
    n_bundles = max(1, int(math.floor(D ** (alpha - 1) / 2 + _EPS)))
    xs = 0.25 + (np.arange(n_bundles) + 0.5) / (2 * n_bundles)
    centers = np.stack([xs, np.full(n_bundles, 0.5)], axis=1)

    step = FAN_STEP_FACTOR * delta
    m = int(math.floor(FAN_ANGLE / step)) + 1
    fan = HALF_PI + (np.arange(m) - (m - 1) / 2) * step
    tubes = np.stack([
        np.repeat(xs, m), np.full(n_bundles * m, 0.5), np.tile(fan, n_bundles),
    ], axis=1)
    return centers, tubes, m


def construct2(k: int, alpha: float, beta: float) -> Configuration:
    """Fans of tubes along a horizontal segment; balls sit at a spread-out subset of fan centers."""
    scale = _min_k(k)
    _check_unit_square(alpha, beta)
    if not alpha >= beta + 1:
        raise BusinessException(ErrorCode.REGION_VIOLATION, f"construction 2 needs α >= β+1; got ({alpha}, {beta})")
    centers, tubes, m = _fan_bundles(scale, alpha)
    n_bundles = centers.shape[0]
    n_balls = max(1, min(_floor_pow(scale.D, beta), n_bundles))
    chosen = (np.arange(n_balls) * n_bundles) // n_balls
    meta = {
        "construction": 2, "alpha": alpha, "beta": beta,
        "n_bundles": n_bundles, "fan_size": m, "fan_step": FAN_STEP_FACTOR * scale.delta,
        "ball_bundles": chosen.tolist(),
    }
    config = Configuration.at_scale(scale, centers[chosen], tubes, meta)
    config.check_size()
    logger.info("construct2 k=%d α=%.3f β=%.3f |P|=%d |T|=%d", k, alpha, beta, config.n_balls, config.n_tubes)
    return config


def construct3(k: int, alpha: float, beta: float) -> Configuration:
    """
    Columns of D balls; ⌊D^α⌋ of them carry a vertical tube.

    Every tube contains its column's D balls. Columns sit at least 2δ apart, so no
    tube reaches a neighbouring column and I = min(⌊D^α⌋, D/2)·D; near β = 2 this
    caps the ⌊D^{β−1}⌋ columns at D/2.
    """
    scale = _min_k(k)
    _check_unit_square(alpha, beta)
    if not beta >= alpha + 1:
        raise BusinessException(ErrorCode.REGION_VIOLATION, f"construction 3 needs β >= α+1; got ({alpha}, {beta})")
    D, delta = scale.D, scale.delta
    n_cols = max(1, min(_floor_pow(D, beta - 1), D // MIN_COLUMN_PITCH))
    n_tubes = max(1, min(_floor_pow(D, alpha), n_cols))
    xs = (np.arange(n_cols) + 0.5) / n_cols
    ys = (np.arange(D) + 0.5) * delta
    balls = np.stack([np.repeat(xs, D), np.tile(ys, n_cols)], axis=1)
    tube_cols = (np.arange(n_tubes) * n_cols) // n_tubes
    tubes = np.stack([xs[tube_cols], np.full(n_tubes, 0.5), np.full(n_tubes, HALF_PI)], axis=1)
    meta = {
        "construction": 3, "alpha": alpha, "beta": beta,
        "n_columns": n_cols, "tube_columns": tube_cols.tolist(),
    }
    config = Configuration.at_scale(scale, balls, tubes, meta)
    config.check_size()
    logger.info("construct3 k=%d α=%.3f β=%.3f |P|=%d |T|=%d", k, alpha, beta, config.n_balls, config.n_tubes)
    return config


def construct4(k: int, alpha: float, beta: float) -> Configuration:
    """Construction-2 fans over a square ball grid confined to the centered ½ × ½ square."""
    scale = _min_k(k)
    _check_unit_square(alpha, beta)
    if not alpha + beta >= 3:
        raise BusinessException(ErrorCode.REGION_VIOLATION, f"construction 4 needs α+β >= 3; got ({alpha}, {beta})")
    _, tubes, m = _fan_bundles(scale, alpha)
    half = scale.D ** (beta / 2)
    spacing = 1.25 / half
    n = max(1, int(math.floor(0.4 * half + _EPS)))
    line = 0.5 + (np.arange(n) - (n - 1) / 2) * spacing
    gx, gy = np.meshgrid(line, line, indexing="ij")
    balls = np.stack([gx.ravel(), gy.ravel()], axis=1)
    meta = {
        "construction": 4, "alpha": alpha, "beta": beta,
        "n_bundles": tubes.shape[0] // m, "fan_size": m, "grid_side": n, "grid_spacing": spacing,
    }
    config = Configuration.at_scale(scale, balls, tubes, meta)
    config.check_size()
    logger.info("construct4 k=%d α=%.3f β=%.3f |P|=%d |T|=%d", k, alpha, beta, config.n_balls, config.n_tubes)
    return config


CONSTRUCTIONS = {1: construct1, 2: construct2, 3: construct3, 4: construct4}


def construct(construction: int, k: int, alpha: float, beta: float, **overrides) -> Configuration:
    """Dispatch by construction id; only construction 1 takes overrides (lam)."""
    try:
        builder = CONSTRUCTIONS[int(construction)]
    except (KeyError, ValueError, TypeError):
        raise BusinessException(ErrorCode.UNKNOWN_CONSTRUCTION, f"construction={construction!r}")
    overrides = {key: value for key, value in overrides.items() if value is not None}
    if overrides and builder is not construct1:
        raise BusinessException(ErrorCode.INVALID_INPUT, f"construction {construction} takes no overrides")
    return builder(k, alpha, beta, **overrides)


def region_of(alpha: float, beta: float) -> int:
    """The construction whose region contains (α, β)."""
    _check_unit_square(alpha, beta)
    if alpha >= beta + 1:
        return 2
    if beta >= alpha + 1:
        return 3
    if alpha + beta >= 3:
        return 4
    return 1


def furstenberg_product(k: int, u: float) -> Configuration:
    """Balls on Cantor(k, u) × {0, δ, …, 1}; no tubes."""
    scale = Scale(k)
    cantor = cantor_generate(k, u)
    xs = cantor.positions
    ys = np.arange(scale.D + 1) * scale.delta
    balls = np.stack([np.repeat(xs, ys.size), np.tile(ys, xs.size)], axis=1)
    config = Configuration.at_scale(scale, balls, np.zeros((0, 3)), {"construction": "furstenberg_product", "u": u})
    config.check_size()
    return config


@dataclass
class FurstenbergConfig:
    scale: Scale
    u: float
    v: float
    tube_params: np.ndarray
    ball_centers: np.ndarray
    members: list[np.ndarray] = field(default_factory=list)

    @property
    def n_balls(self) -> int:
        return int(self.ball_centers.shape[0])

    def as_configuration(self) -> Configuration:
        meta = {"construction": "furstenberg", "u": self.u, "v": self.v}
        return Configuration.at_scale(self.scale, self.ball_centers, self.tube_params, meta)


def furstenberg_config(k: int, u: float, v: float) -> FurstenbergConfig:
    """
    Tubes from a (δ, v) family, each carrying Cantor(k, u) balls along its midline.

    v ≤ 1: ⌊D^v⌋ parallel vertical tubes. v > 1: ⌊D^{v−1}⌋ directions δ apart
    around the vertical, each with D offsets δ apart. Ball centers are snapped
    to the δℤ lattice, moving them at most δ/√2, then deduplicated.
    """
    scale = Scale(k)
    if not (0.0 < u <= 1.0 and 1.0 <= v <= 2.0):
        raise BusinessException(ErrorCode.REGION_VIOLATION, f"furstenberg needs 0<u<=1<=v<=2; got ({u}, {v})")
    D, delta = scale.D, scale.delta
    if v <= 1.0:
        n = max(1, _floor_pow(D, v))
        xs = (np.arange(n) + 0.5) / n
        tubes = np.stack([xs, np.full(n, 0.5), np.full(n, HALF_PI)], axis=1)
    else:
        n_dir = max(1, _floor_pow(D, v - 1))
        thetas = HALF_PI + (np.arange(n_dir) - (n_dir - 1) / 2) * delta
        offsets = (np.arange(D) + 0.5) * delta - 0.5
        th, off = np.repeat(thetas, D), np.tile(offsets, n_dir)
        tubes = np.stack([0.5 - off * np.sin(th), 0.5 + off * np.cos(th), th], axis=1)

    along = cantor_generate(k, u).positions - 0.5
    th = tubes[:, 2:3]
    px = tubes[:, 0:1] + along[None, :] * np.cos(th)
    py = tubes[:, 1:2] + along[None, :] * np.sin(th)
    lattice = np.stack([np.floor(px / delta + 0.5), np.floor(py / delta + 0.5)], axis=-1).astype(np.int64)
    flat = lattice.reshape(-1, 2)
    uniq, inverse = np.unique(flat, axis=0, return_inverse=True)
    inverse = inverse.reshape(tubes.shape[0], along.size)
    members = [np.unique(row) for row in inverse]
    centers = uniq.astype(float) * delta
    logger.info("furstenberg k=%d u=%.3f v=%.3f |T|=%d |P|=%d", k, u, v, tubes.shape[0], centers.shape[0])
    return FurstenbergConfig(scale, float(u), float(v), tubes, centers, members)


@dataclass
class RegularizationResult:
    """P′ as a multiset of centers plus the maximal heavy squares (x0, y0, w) that were replaced."""

    scale: Scale
    centers: np.ndarray
    squares: list[tuple[float, float, float]]
    replaced: int
    copies: int


def _check_odd_lattice(centers: np.ndarray, scale: Scale) -> None:
    scaled = centers / scale.delta
    nearest = np.round(scaled)
    odd = np.mod(nearest, 2) == 1
    if not np.all(np.abs(scaled - nearest) <= 1e-6) or not np.all(odd):
        raise BusinessException(ErrorCode.LATTICE_VIOLATION, "ball centers must lie on (δ(2ℤ+1))²")


def regularize(centers, k: int, beta: float, K_beta: float) -> RegularizationResult:
    """
    Replace the maximal over-full dyadic squares by superposed product sets.

    A square of side w (δ < w < 1) is over-full when it holds at least
    K_β·(w/δ)^{β+1} balls. Each maximal one loses its balls and gains ⌈K_β⌉
    copies of the product set built at side w with Cantor dimension β.
    """
    scale = Scale(k)
    centers = np.asarray(centers, float).reshape(-1, 2)
    if not 0.0 <= beta <= 1.0 or K_beta <= 0:
        raise BusinessException(ErrorCode.INVALID_EXPONENT, f"β={beta}, K_β={K_beta}")
    _check_odd_lattice(centers, scale)

    heavy = {}
    for n, ix, iy, counts in dyadic_count_tree(centers, scale):
        if n in (0, scale.k):
            continue
        w = math.ldexp(1.0, -n)
        over = counts >= K_beta * (w / scale.delta) ** (beta + 1) - _EPS
        heavy[n] = set(zip(ix[over].tolist(), iy[over].tolist()))

    maximal = []
    for n in sorted(heavy):
        for ix, iy in sorted(heavy[n]):
            covered = any((ix >> (n - m), iy >> (n - m)) in heavy[m] for m in heavy if m < n)
            if not covered:
                maximal.append((n, ix, iy))

    copies = int(math.ceil(K_beta - _EPS))
    keep = np.ones(centers.shape[0], dtype=bool)
    pieces, squares = [], []
    cells = np.clip(np.floor(centers * scale.D).astype(np.int64), 0, scale.D - 1)
    for n, ix, iy in maximal:
        w = math.ldexp(1.0, -n)
        shift = scale.k - n
        inside = ((cells[:, 0] >> shift) == ix) & ((cells[:, 1] >> shift) == iy)
        keep &= ~inside
        product = build_Pw(scale.k, w, beta, ix * w, iy * w)
        pieces.extend([product.centers] * copies)
        squares.append((ix * w, iy * w, w))

    result = np.concatenate([centers[keep]] + pieces) if pieces else centers.copy()
    logger.info("regularize k=%d β=%.3f squares=%d |P|=%d |P'|=%d", k, beta, len(squares), centers.shape[0], result.shape[0])
    return RegularizationResult(scale, result, squares, int(np.count_nonzero(~keep)), copies)
