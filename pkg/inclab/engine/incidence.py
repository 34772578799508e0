"""Incidence counting, proof diagnostics, thickening, coloring partitions and duality."""
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import shapely
from scipy.spatial import cKDTree

from inclab.config import settings
from inclab.core.error_codes import BusinessException, ErrorCode
from inclab.engine.geometry import (
    Configuration,
    Tube,
    angle_between,
    ball_tube_distance,
    normalize_angle,
    resolve_tolerance,
    tube_polygons,
)
from inclab.engine.spacing import overlapping_tube_pairs


logger = logging.getLogger(__name__)

MIN_CELL = 1.0 / 1024
DUAL_GROUPS = 8


@dataclass
class IncidenceReport:
    total: int
    per_tube: np.ndarray
    per_ball: np.ndarray
    method: str
    elapsed: float = 0.0

    def to_dict(self, include_vectors: bool = False) -> dict:
        data = {
            "total": int(self.total),
            "method": self.method,
            "elapsed": self.elapsed,
            "n_balls": int(self.per_ball.size),
            "n_tubes": int(self.per_tube.size),
        }
        if include_vectors:
            data["per_tube"] = self.per_tube.tolist()
            data["per_ball"] = self.per_ball.tolist()
        return data


def resolve_threads(threads: Optional[int]) -> int:
    threads = settings.INCLAB_THREADS if threads is None else threads
    return threads if threads and threads > 0 else (os.cpu_count() or 1)


def _pair_mask(config: Configuration, ball_idx: np.ndarray, tube_params: np.ndarray, tol: float) -> np.ndarray:
    centers = config.ball_centers[ball_idx]
    dist = ball_tube_distance(
        centers[:, 0:1], centers[:, 1:2],
        tube_params[None, :, 0], tube_params[None, :, 1], tube_params[None, :, 2],
        config.tube_width, config.tube_length,
    )
    return dist <= config.ball_radius * (1.0 + tol)


def count_brute(config: Configuration, pair_limit: Optional[int] = None, tol: Optional[float] = None) -> IncidenceReport:
    """All-pairs evaluation of the ball/tube predicate."""
    tol = resolve_tolerance(tol)
    pair_limit = settings.INCLAB_PAIR_LIMIT if pair_limit is None else pair_limit
    n, m = config.n_balls, config.n_tubes
    if n * m > pair_limit:
        raise BusinessException(ErrorCode.SIZE_GUARD_EXCEEDED, f"|P|·|T|={n * m} > {pair_limit}")

    start = time.perf_counter()
    per_tube = np.zeros(m, np.int64)
    per_ball = np.zeros(n, np.int64)
    chunk = max(1, 4_000_000 // max(n, 1))
    all_balls = np.arange(n)
    for lo in range(0, m, chunk):
        mask = _pair_mask(config, all_balls, config.tube_params[lo:lo + chunk], tol)
        per_tube[lo:lo + chunk] = mask.sum(axis=0)
        per_ball += mask.sum(axis=1)
    elapsed = time.perf_counter() - start
    return IncidenceReport(int(per_tube.sum()), per_tube, per_ball, "brute", elapsed)


class BallGrid:
    """Uniform bucket grid over ball centers, stored as sorted cell ids with offsets."""

    def __init__(self, centers: np.ndarray, cell: float):
        self.cell = cell
        self.origin = centers.min(axis=0) if centers.size else np.zeros(2)
        extent = (centers.max(axis=0) - self.origin) if centers.size else np.zeros(2)
        self.shape = (np.floor(extent / cell).astype(np.int64) + 1)
        idx = self._cell_index(centers)
        keys = idx[:, 0] * self.shape[1] + idx[:, 1]
        self.order = np.argsort(keys, kind="stable")
        self.sorted_keys = keys[self.order]

    def _cell_index(self, pts: np.ndarray) -> np.ndarray:
        idx = np.floor((pts - self.origin) / self.cell).astype(np.int64)
        return np.clip(idx, 0, self.shape - 1)

    def balls_near(self, pts: np.ndarray, reach: float) -> np.ndarray:
        """Indices of balls in every cell meeting a square of half-side reach around any point."""
        span = int(math.ceil(2 * reach / self.cell)) + 1
        lo = np.floor((pts - reach - self.origin) / self.cell).astype(np.int64)
        hi = np.minimum(np.floor((pts + reach - self.origin) / self.cell).astype(np.int64), self.shape - 1)
        steps = np.arange(span)
        ix = lo[:, 0:1] + steps
        iy = lo[:, 1:2] + steps
        ok_x = (ix >= 0) & (ix <= hi[:, 0:1])
        ok_y = (iy >= 0) & (iy <= hi[:, 1:2])
        keys = ix[:, :, None] * self.shape[1] + iy[:, None, :]
        keys = np.unique(keys[ok_x[:, :, None] & ok_y[:, None, :]])
        if keys.size == 0:
            return np.zeros(0, np.int64)
        starts = np.searchsorted(self.sorted_keys, keys, "left")
        lengths = np.searchsorted(self.sorted_keys, keys, "right") - starts
        starts, lengths = starts[lengths > 0], lengths[lengths > 0]
        if lengths.size == 0:
            return np.zeros(0, np.int64)
        ends = np.cumsum(lengths)
        positions = np.arange(ends[-1]) + np.repeat(starts - (ends - lengths), lengths)
        return self.order[positions]


def _grid_chunk(config: Configuration, grid: BallGrid, tube_idx: np.ndarray, tol: float):
    cell = grid.cell
    reach = cell / 2 + config.tube_width / 2 + config.ball_radius * (1.0 + tol) + 1e-12
    n_samples = int(math.ceil(config.tube_length / cell)) + 1
    along = np.linspace(-config.tube_length / 2, config.tube_length / 2, n_samples)
    per_tube = np.zeros(tube_idx.size, np.int64)
    hits = []
    for pos, j in enumerate(tube_idx):
        cx, cy, theta = config.tube_params[j]
        spine = np.stack([cx + along * math.cos(theta), cy + along * math.sin(theta)], axis=1)
        near = grid.balls_near(spine, reach)
        if near.size == 0:
            continue
        inc = _pair_mask(config, near, config.tube_params[j:j + 1], tol)[:, 0]
        per_tube[pos] = int(np.count_nonzero(inc))
        hits.append(near[inc])
    return per_tube, (np.concatenate(hits) if hits else np.zeros(0, np.int64))


def count_grid(config: Configuration, threads: Optional[int] = None, tol: Optional[float] = None) -> IncidenceReport:
    """
    Bucketed counting: each tube walks its spine and tests only balls in nearby cells.

    The per-pair predicate is the one count_brute evaluates, so totals and
    per-object vectors agree exactly.
    """
    tol = resolve_tolerance(tol)
    start = time.perf_counter()
    n, m = config.n_balls, config.n_tubes
    per_tube = np.zeros(m, np.int64)
    per_ball = np.zeros(n, np.int64)
    if n and m:
        cell = max(4 * max(config.ball_radius, config.tube_width), MIN_CELL)
        grid = BallGrid(config.ball_centers, cell)
        workers = resolve_threads(threads)
        chunks = [c for c in np.array_split(np.arange(m), max(1, min(m, workers * 4))) if c.size]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: _grid_chunk(config, grid, c, tol), chunks))
        for chunk, (counts, hits) in zip(chunks, results):
            per_tube[chunk] = counts
            per_ball += np.bincount(hits, minlength=n)
    elapsed = time.perf_counter() - start
    logger.info("count_grid |P|=%d |T|=%d I=%d in %.3fs", n, m, int(per_tube.sum()), elapsed)
    return IncidenceReport(int(per_tube.sum()), per_tube, per_ball, "grid", elapsed)


def count(config: Configuration, method: str = "grid", threads: Optional[int] = None) -> IncidenceReport:
    if method == "grid":
        return count_grid(config, threads)
    if method == "brute":
        return count_brute(config)
    raise BusinessException(ErrorCode.INVALID_INPUT, f"unknown counting method {method!r}")


def incident_balls(config: Configuration, tube_index: int, tol: Optional[float] = None) -> np.ndarray:
    """Indices of balls meeting one tube."""
    tol = resolve_tolerance(tol)
    mask = _pair_mask(config, np.arange(config.n_balls), config.tube_params[tube_index:tube_index + 1], tol)
    return np.flatnonzero(mask[:, 0])


def _tubes_meeting(tubes: np.ndarray, t: Tube, width: float, length: float) -> np.ndarray:
    polys = tube_polygons(np.asarray(tubes, float).reshape(-1, 3), width, length)
    return shapely.intersects(polys, t.polygon())


def angle_bands(tubes: np.ndarray, t: Tube, delta: float) -> dict[float, np.ndarray]:
    """
    Indices of tubes meeting t, split by angle with t.

    The base band holds angles below 2δ; band w ≥ 2δ holds angles in [w, 2w).
    The bands partition all tubes meeting t.
    """
    tubes = np.asarray(tubes, float).reshape(-1, 3)
    meets = _tubes_meeting(tubes, t, t.width, t.length)
    angles = angle_between(tubes[:, 2], t.theta) if tubes.size else np.zeros(0)
    bands = {delta: np.flatnonzero(meets & (angles < 2 * delta))}
    w = 2 * delta
    while w < math.pi / 2:
        bands[w] = np.flatnonzero(meets & (angles >= w) & (angles < 2 * w))
        w *= 2
    return bands


def tubes_at_angle(tubes: np.ndarray, t: Tube, w: float, delta: float) -> np.ndarray:
    """The band of tubes meeting t at angle w (dyadic multiple of δ)."""
    ratio = w / delta
    if w > math.pi / 2 or ratio < 1 - 1e-12 or abs(math.log2(ratio) - round(math.log2(ratio))) > 1e-9:
        raise BusinessException(ErrorCode.INVALID_INPUT, f"w={w} is not a dyadic multiple of δ in [δ, π/2]")
    bands = angle_bands(tubes, t, delta)
    for key, idx in bands.items():
        if math.isclose(key, w):
            return idx
    return np.zeros(0, np.int64)


def _check_alpha(alpha: float) -> None:
    if not alpha > 0:
        raise BusinessException(ErrorCode.INVALID_EXPONENT, f"α={alpha} must be positive")


def moment_J(report: IncidenceReport, alpha: float, b: float) -> float:
    """Σ_p |T(p)|^{(b+α)/α}."""
    _check_alpha(alpha)
    return float(np.sum(report.per_ball.astype(float) ** ((b + alpha) / alpha)))


def moment_j(config: Configuration, report: IncidenceReport, tube_index: int, alpha: float, b: float) -> float:
    """Σ over balls p meeting tube t of |T(p)|^{b/α}."""
    _check_alpha(alpha)
    balls = incident_balls(config, tube_index)
    return float(np.sum(report.per_ball[balls].astype(float) ** (b / alpha)))


def thicken(config: Configuration, S: int) -> Configuration:
    """Same centers and midlines, radius and width multiplied by S."""
    if isinstance(S, bool) or int(S) != S or S < 1:
        raise BusinessException(ErrorCode.INVALID_INPUT, f"S={S} must be a positive integer")
    if S * config.ball_radius > 1 or S * config.tube_width > 1:
        raise BusinessException(ErrorCode.INVALID_INPUT, f"S·δ must stay <= 1, got S={S}")
    if S == 1:
        return config
    width = config.tube_width * S
    meta = dict(config.meta, thickening=config.thickening * int(S), working_delta=config.scale.delta * config.thickening * S)
    return Configuration(
        config.scale, config.ball_centers.copy(), config.tube_params.copy(),
        config.ball_radius * S, width, max(config.tube_length, width), meta,
    )


@dataclass
class Partition:
    """Greedy coloring: colors[i] is the class of object i."""

    colors: np.ndarray
    max_degree: int
    edges: np.ndarray = field(repr=False, default_factory=lambda: np.zeros((0, 2), np.int64))

    @property
    def n_classes(self) -> int:
        return int(self.colors.max()) + 1 if self.colors.size else 0

    def classes(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.colors == c) for c in range(self.n_classes)]


def _greedy_color(n: int, edges: np.ndarray) -> Partition:
    neighbours = [[] for _ in range(n)]
    for i, j in edges:
        neighbours[i].append(j)
        neighbours[j].append(i)
    colors = np.full(n, -1, np.int64)
    for i in range(n):
        used = {colors[j] for j in neighbours[i] if colors[j] >= 0}
        c = 0
        while c in used:
            c += 1
        colors[i] = c
    degree = max((len(adj) + 1 for adj in neighbours), default=0)
    return Partition(colors, degree, edges)


def color_partition_balls(centers, radius: float, tol: Optional[float] = None) -> Partition:
    """Color the ball intersection graph in input order."""
    tol = resolve_tolerance(tol)
    centers = np.asarray(centers, float).reshape(-1, 2)
    if centers.shape[0] == 0:
        return Partition(np.zeros(0, np.int64), 0)
    pairs = cKDTree(centers).query_pairs(2 * radius * (1.0 + tol), output_type="ndarray")
    return _greedy_color(centers.shape[0], pairs)


def color_partition_tubes(tubes, width: float, length: float = 1.0, tol: Optional[float] = None) -> Partition:
    """Color the half-area overlap graph of tubes in input order."""
    tubes = np.asarray(tubes, float).reshape(-1, 3)
    if tubes.shape[0] == 0:
        return Partition(np.zeros(0, np.int64), 0)
    return _greedy_color(tubes.shape[0], overlapping_tube_pairs(tubes, width, length, tol))


def dualize(config: Configuration, tol: Optional[float] = None) -> Configuration:
    """
    Point/line duality: ball (a, b) ↔ tube with midline y = a·x − b.

    A tube with midline y = m·x + c becomes a ball at (m, −c). This is the
    sign-flipped form of the pairing ball (p, q) ↦ y = −p·x + q, tube
    y = m·x + c ↦ ball (m, c): incidences match under either form, but only
    this one is its own inverse, so applying the map twice restores every
    midline. meta["duality"] records the convention.
    Dual tubes are centered on x = 0 and long enough to span x ∈ [−1, 1].
    """
    tol = resolve_tolerance(tol)
    tubes = config.tube_params
    slopes = np.tan(tubes[:, 2]) if tubes.size else np.zeros(0)
    if np.any(np.abs(slopes) > 1.0 + 1e-9):
        raise BusinessException(
            ErrorCode.SLOPE_OUT_OF_RANGE, f"max |slope|={float(np.max(np.abs(slopes))):.6g}; rotate into a group first"
        )
    intercepts = tubes[:, 1] - slopes * tubes[:, 0] if tubes.size else np.zeros(0)
    new_centers = np.stack([slopes, -intercepts], axis=1)

    a, b = config.ball_centers[:, 0], config.ball_centers[:, 1]
    reach = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    length = max(2.0 * math.sqrt(1.0 + reach * reach), config.ball_radius)
    new_tubes = np.stack([np.zeros_like(a), -b, normalize_angle(np.arctan(a))], axis=1) if a.size else np.zeros((0, 3))

    meta = dict(config.meta, duality="ball (a, b) <-> midline y = a x - b", dual_of=config.meta.get("construction"))
    return Configuration(config.scale, new_centers, new_tubes, config.tube_width, config.ball_radius, length, meta)


def duality_groups(config: Configuration) -> list[tuple[float, Configuration]]:
    """
    Split tubes into angle groups of width π/8 and rotate each into |slope| ≤ tan(π/16).

    Returns (rotation, rotated configuration) per nonempty group; every
    configuration keeps all balls.
    """
    width = math.pi / DUAL_GROUPS
    group = np.minimum((config.tube_params[:, 2] // width).astype(np.int64), DUAL_GROUPS - 1)
    out = []
    for g in range(DUAL_GROUPS):
        members = config.tube_params[group == g]
        if members.shape[0] == 0:
            continue
        rotation = -(g * width + width / 2)
        part = Configuration(
            config.scale, config.ball_centers, members, config.ball_radius, config.tube_width,
            config.tube_length, dict(config.meta, dual_group=g),
        )
        out.append((rotation, part.rotated(rotation, about=(0.0, 0.0))))
    return out
