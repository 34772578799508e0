"""Spacing profiles: measured K(w) for (δ, s, K)-set claims on balls and tubes."""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.spatial import cKDTree

from inclab.config import settings
from inclab.core.error_codes import BusinessException, ErrorCode
from inclab.engine.geometry import (
    Ball,
    Scale,
    Tube,
    angle_between,
    overlap_fractions,
    resolve_tolerance,
    to_tube_frame,
    tube_corners,
)


logger = logging.getLogger(__name__)

# Along-axis anchors of net query tubes sit on this lattice.
ANCHOR_STEP = 0.25

BallInput = Union[np.ndarray, Sequence[Ball]]
TubeInput = Union[np.ndarray, Sequence[Tube]]


@dataclass
class LevelRecord:
    level_n: int
    w: float
    max_count: int
    implied_K: float
    witness: str


@dataclass
class SpacingProfile:
    """Per-dyadic-level maximum counts, ordered by increasing w."""

    scale: Scale
    exponent: float
    kind: str
    levels: list[LevelRecord] = field(default_factory=list)

    @property
    def K(self) -> float:
        return max((rec.implied_K for rec in self.levels), default=0.0)

    def at(self, w: float) -> LevelRecord:
        for rec in self.levels:
            if math.isclose(rec.w, w):
                return rec
        raise KeyError(w)

    def counts(self) -> list[int]:
        return [rec.max_count for rec in self.levels]


def dyadic_widths(scale: Scale) -> list[tuple[int, float]]:
    """(n, w = 2^-n) for δ ≤ w ≤ 1, finest first."""
    return [(n, math.ldexp(1.0, -n)) for n in range(scale.k, -1, -1)]


def _implied(count: int, w: float, scale: Scale, s: float) -> float:
    return count / (w / scale.delta) ** s


def _check_exponent(s: float, upper: float = 2.0) -> None:
    if not 0.0 <= s <= upper:
        raise BusinessException(ErrorCode.INVALID_EXPONENT, f"s={s} not in [0, {upper}]")


def ball_centers(balls: BallInput, scale: Scale) -> np.ndarray:
    """Center array from Ball objects or an (n, 2) array; Ball radii must all equal δ."""
    if isinstance(balls, np.ndarray):
        return balls.astype(float).reshape(-1, 2)
    balls = list(balls)
    if not balls:
        return np.zeros((0, 2))
    radii = np.array([b.r for b in balls])
    if np.any(radii != radii[0]) or not math.isclose(radii[0], scale.delta):
        raise BusinessException(ErrorCode.MIXED_RADII, f"radii in [{radii.min()}, {radii.max()}], δ={scale.delta}")
    return np.array([(b.cx, b.cy) for b in balls], dtype=float)


def tube_array(tubes: TubeInput, scale: Scale) -> np.ndarray:
    """(m, 3) array of (cx, cy, theta); Tube widths must all equal δ."""
    if isinstance(tubes, np.ndarray):
        return tubes.astype(float).reshape(-1, 3)
    tubes = list(tubes)
    if not tubes:
        return np.zeros((0, 3))
    widths = np.array([t.width for t in tubes])
    if np.any(widths != widths[0]) or not math.isclose(widths[0], scale.delta):
        raise BusinessException(ErrorCode.MIXED_RADII, f"widths in [{widths.min()}, {widths.max()}], δ={scale.delta}")
    return np.array([(t.cx, t.cy, t.theta) for t in tubes], dtype=float)


def dyadic_count_tree(centers: np.ndarray, scale: Scale, radius: Optional[float] = None,
                      tol: Optional[float] = None) -> list[tuple[int, np.ndarray, np.ndarray, np.ndarray]]:
    """
    Occupied dyadic squares with their ball counts, finest level first.

    A ball counts toward the closed square [ix·w, (ix+1)·w] × [iy·w, (iy+1)·w] only when
    its box [x−r, x+r]² lies inside it; a ball straddling a dyadic line at some level is
    absent there and reappears at the first coarser level whose square holds it.

    Returns:
        List of (n, ix, iy, counts) over occupied squares of side w = 2^-n.
    """
    tol = resolve_tolerance(tol)
    r = scale.delta if radius is None else radius
    lo, hi = centers - r, centers + r
    tree = []
    for n, _ in dyadic_widths(scale):
        side = 1 << n
        slack = tol * side
        first = np.floor(lo * side + slack).astype(np.int64)
        last = np.ceil(hi * side - slack).astype(np.int64) - 1
        fits = np.all((first == last) & (first >= 0) & (first < side), axis=1)
        keys, counts = np.unique(first[fits, 0] * side + first[fits, 1], return_counts=True)
        tree.append((n, keys // side, keys % side, counts.astype(np.int64)))
    return tree


def ball_profile_dyadic(balls: BallInput, scale: Scale, s: float) -> SpacingProfile:
    """Largest number of balls inside one dyadic square, at every level."""
    _check_exponent(s)
    centers = ball_centers(balls, scale)
    profile = SpacingProfile(scale, s, "balls-dyadic")
    for n, ix, iy, counts in dyadic_count_tree(centers, scale):
        w = math.ldexp(1.0, -n)
        if counts.size:
            best = int(np.argmax(counts))
            count = int(counts[best])
            witness = f"square({ix[best] * w:.17g},{iy[best] * w:.17g},{w:.17g})"
        else:
            count, witness = 0, ""
        profile.levels.append(LevelRecord(n, w, count, _implied(count, w, scale, s), witness))
    logger.debug("dyadic ball profile k=%d s=%.3f n=%d K=%.4g", scale.k, s, centers.shape[0], profile.K)
    return profile


def ball_profile_brute(balls: BallInput, scale: Scale, s: float, limit: Optional[int] = None,
                       tol: Optional[float] = None) -> SpacingProfile:
    """Max count of balls inside B_w(center) over all centers of P, per dyadic w."""
    _check_exponent(s)
    tol = resolve_tolerance(tol)
    limit = settings.INCLAB_BRUTE_LIMIT if limit is None else limit
    centers = ball_centers(balls, scale)
    if centers.shape[0] > limit:
        raise BusinessException(ErrorCode.SIZE_GUARD_EXCEEDED, f"|P|={centers.shape[0]} > {limit}")

    profile = SpacingProfile(scale, s, "balls-brute")
    tree = cKDTree(centers) if centers.shape[0] else None
    for n, w in dyadic_widths(scale):
        if tree is None:
            profile.levels.append(LevelRecord(n, w, 0, 0.0, ""))
            continue
        radius = (w - scale.delta) + tol * w
        counts = np.asarray(tree.query_ball_point(centers, radius, return_length=True))
        best = int(np.argmax(counts))
        count = int(counts[best])
        witness = f"ball({centers[best, 0]:.17g},{centers[best, 1]:.17g},{w:.17g})"
        profile.levels.append(LevelRecord(n, w, count, _implied(count, w, scale, s), witness))
    return profile


def interval_profile_dyadic(positions, scale: Scale, s: float) -> SpacingProfile:
    """One-dimensional analogue: max count of centers per dyadic interval of [0, 1]."""
    _check_exponent(s, upper=1.0)
    positions = np.asarray(positions, float).ravel()
    profile = SpacingProfile(scale, s, "intervals-dyadic")
    idx = np.clip(np.floor(positions * scale.D).astype(np.int64), 0, scale.D - 1)
    for n, w in dyadic_widths(scale):
        if idx.size:
            keys, counts = np.unique(idx >> (scale.k - n), return_counts=True)
            best = int(np.argmax(counts))
            count, witness = int(counts[best]), f"interval({keys[best] * w:.17g},{w:.17g})"
        else:
            count, witness = 0, ""
        profile.levels.append(LevelRecord(n, w, count, _implied(count, w, scale, s), witness))
    return profile


def _sorted_angle_window(sorted_theta: np.ndarray, center: float, half_width: float) -> np.ndarray:
    """Indices into sorted_theta within half_width of center, mod π."""
    if half_width >= math.pi / 2:
        return np.arange(sorted_theta.size)
    lo, hi = center - half_width, center + half_width
    parts = []
    if lo < 0:
        parts.append(np.arange(np.searchsorted(sorted_theta, lo + math.pi, "left"), sorted_theta.size))
        lo = 0.0
    if hi >= math.pi:
        parts.append(np.arange(0, np.searchsorted(sorted_theta, hi - math.pi, "right")))
        hi = math.pi
    parts.append(np.arange(np.searchsorted(sorted_theta, lo, "left"), np.searchsorted(sorted_theta, hi, "right")))
    return np.unique(np.concatenate(parts))


def _max_stabbing(lo: np.ndarray, hi: np.ndarray) -> tuple[int, int]:
    """Max number of closed integer intervals [lo, hi] sharing a point, and that point."""
    positions = np.concatenate([lo, hi + 1])
    deltas = np.concatenate([np.ones_like(lo), -np.ones_like(hi)])
    order = np.lexsort((deltas, positions))
    running = np.cumsum(deltas[order])
    best = int(np.argmax(running))
    return int(running[best]), int(positions[order][best])


def _net_level_max(tubes: np.ndarray, corners: np.ndarray, sorted_order: np.ndarray, scale: Scale,
                   w: float) -> tuple[int, str]:
    """Best count over the canonical query family at one level."""
    delta = scale.delta
    slack = delta / 2
    half_w = w / 2 + slack
    half_l = 1.0 + slack
    lattice = w / 2
    eps = 1e-9
    per_quarter = math.ceil((math.pi / 2) / (w / 2))
    window = math.asin(min(1.0, w + delta)) + 1e-12
    sorted_theta = tubes[sorted_order, 2]

    best_count, best_witness = 0, ""
    for j in range(2 * per_quarter):
        theta = (math.pi / 2) * (j / per_quarter)
        cand = sorted_order[_sorted_angle_window(sorted_theta, theta, window)]
        if cand.size <= best_count:
            continue
        pts = corners[cand]
        u, v = to_tube_frame(pts[..., 0], pts[..., 1], 0.0, 0.0, theta)
        v_lo, v_hi = v.min(axis=1), v.max(axis=1)
        u_lo, u_hi = u.min(axis=1), u.max(axis=1)
        i_lo = np.ceil((v_hi - half_w) / lattice - eps).astype(np.int64)
        i_hi = np.floor((v_lo + half_w) / lattice + eps).astype(np.int64)
        a_lo = np.ceil((u_hi - half_l) / ANCHOR_STEP - eps).astype(np.int64)
        a_hi = np.floor((u_lo + half_l) / ANCHOR_STEP + eps).astype(np.int64)
        ok = (i_lo <= i_hi) & (a_lo <= a_hi)
        if np.count_nonzero(ok) <= best_count:
            continue
        i_lo, i_hi, a_lo, a_hi = i_lo[ok], i_hi[ok], a_lo[ok], a_hi[ok]
        for a in range(int(a_lo.min()), int(a_hi.max()) + 1):
            sel = (a_lo <= a) & (a_hi >= a)
            if np.count_nonzero(sel) <= best_count:
                continue
            count, i = _max_stabbing(i_lo[sel], i_hi[sel])
            if count > best_count:
                c, s = math.cos(theta), math.sin(theta)
                along, across = a * ANCHOR_STEP, i * lattice
                cx, cy = along * c - across * s, along * s + across * c
                best_count = count
                best_witness = f"tube({cx:.17g},{cy:.17g},{theta:.17g},{w:.17g})"
    return best_count, best_witness


def _anchor_level_max(tubes: np.ndarray, corners: np.ndarray, w: float, tol: float,
                      chunk: int = 256) -> tuple[int, str]:
    """Best count over exact w × 2 query tubes anchored on each data tube."""
    best_count, best_witness = 0, ""
    for start in range(0, tubes.shape[0], chunk):
        anchors = tubes[start:start + chunk]
        u, v = to_tube_frame(
            corners[None, :, :, 0], corners[None, :, :, 1],
            anchors[:, None, None, 0], anchors[:, None, None, 1], anchors[:, None, None, 2],
        )
        inside = np.all(np.abs(u) <= 1.0 * (1.0 + tol), axis=2) & np.all(np.abs(v) <= w / 2 * (1.0 + tol), axis=2)
        counts = inside.sum(axis=1)
        best = int(np.argmax(counts))
        if counts[best] > best_count:
            best_count = int(counts[best])
            cx, cy, theta = anchors[best]
            best_witness = f"tube({cx:.17g},{cy:.17g},{theta:.17g},{w:.17g})"
    return best_count, best_witness


def tube_profile(tubes: TubeInput, scale: Scale, s: float, mode: str = "net", limit: Optional[int] = None,
                 tol: Optional[float] = None) -> SpacingProfile:
    """
    Max number of data tubes inside a w × 2 query tube, per dyadic w.

    net: directions on a w/2-net of [0, π), across-offsets on the w/2 lattice,
    along-anchors on the ¼ lattice; queries are thickened by δ/2 on every side
    so each δ-tube fits some level-δ query. brute: additionally every data tube
    anchors an exact w × 2 query. Counts are made nondecreasing in w by a
    running maximum over finer levels.
    """
    _check_exponent(s)
    if mode not in ("net", "brute"):
        raise BusinessException(ErrorCode.INVALID_INPUT, f"unknown tube profile mode {mode!r}")
    tol = resolve_tolerance(tol)
    arr = tube_array(tubes, scale)
    if mode == "brute":
        limit = settings.INCLAB_BRUTE_LIMIT if limit is None else limit
        if arr.shape[0] > limit:
            raise BusinessException(ErrorCode.SIZE_GUARD_EXCEEDED, f"|T|={arr.shape[0]} > {limit}")

    profile = SpacingProfile(scale, s, f"tubes-{mode}")
    corners = tube_corners(arr[:, 0], arr[:, 1], arr[:, 2], scale.delta, 1.0) if arr.shape[0] else None
    order = np.argsort(arr[:, 2], kind="stable")
    running, running_witness = 0, ""
    for n, w in dyadic_widths(scale):
        if arr.shape[0]:
            count, witness = _net_level_max(arr, corners, order, scale, w)
            if mode == "brute":
                anchored, anchor_witness = _anchor_level_max(arr, corners, w, tol)
                if anchored > count:
                    count, witness = anchored, anchor_witness
            if count > running:
                running, running_witness = count, witness
        profile.levels.append(LevelRecord(n, w, running, _implied(running, w, scale, s), running_witness))
    logger.debug("tube profile mode=%s k=%d |T|=%d K=%.4g", mode, scale.k, arr.shape[0], profile.K)
    return profile


def max_intersect_degree_balls(balls: BallInput, radius: float, tol: Optional[float] = None) -> int:
    """Largest number of balls meeting one ball, itself included."""
    tol = resolve_tolerance(tol)
    centers = balls.astype(float).reshape(-1, 2) if isinstance(balls, np.ndarray) else np.array(
        [(b.cx, b.cy) for b in balls], dtype=float
    ).reshape(-1, 2)
    if centers.shape[0] == 0:
        return 0
    tree = cKDTree(centers)
    counts = tree.query_ball_point(centers, 2 * radius * (1.0 + tol), return_length=True)
    return int(np.max(counts))


def overlapping_tube_pairs(tubes: np.ndarray, width: float, length: float = 1.0,
                           tol: Optional[float] = None, chunk: int = 512) -> np.ndarray:
    """Index pairs (i < j) of tubes whose common area is at least half a tube."""
    tol = resolve_tolerance(tol)
    tubes = np.asarray(tubes, float).reshape(-1, 3)
    m = tubes.shape[0]
    if m < 2:
        return np.zeros((0, 2), np.int64)
    window = math.asin(min(1.0, 2 * width / length)) + 1e-12
    order = np.argsort(tubes[:, 2], kind="stable")
    sorted_theta = tubes[order, 2]
    found = []
    for i in range(m):
        near = order[_sorted_angle_window(sorted_theta, tubes[i, 2], window)]
        near = near[near > i]
        if near.size == 0:
            continue
        u, v = to_tube_frame(tubes[near, 0], tubes[near, 1], tubes[i, 0], tubes[i, 1], tubes[i, 2])
        phi = angle_between(tubes[near, 2], tubes[i, 2])
        near = near[(np.abs(u) <= length / 2 + width) & (np.abs(v) <= width + length / 2 * np.sin(phi))]
        if near.size:
            found.append(np.stack([np.full(near.size, i), near], axis=1))
    if not found:
        return np.zeros((0, 2), np.int64)
    pairs = np.concatenate(found)
    keep = []
    for start in range(0, pairs.shape[0], chunk):
        block = pairs[start:start + chunk]
        frac = overlap_fractions(tubes[block[:, 0]], tubes[block[:, 1]], width, length)
        keep.append(block[frac >= 0.5 * (1.0 - tol)])
    return np.concatenate(keep)


def max_overlap_degree_tubes(tubes: TubeInput, width: float, length: float = 1.0,
                             tol: Optional[float] = None) -> int:
    """Largest number of tubes overlapping one tube in at least half its area, itself included."""
    arr = tubes.astype(float).reshape(-1, 3) if isinstance(tubes, np.ndarray) else np.array(
        [(t.cx, t.cy, t.theta) for t in tubes], dtype=float
    ).reshape(-1, 3)
    if arr.shape[0] == 0:
        return 0
    pairs = overlapping_tube_pairs(arr, width, length, tol)
    degree = np.ones(arr.shape[0], np.int64)
    np.add.at(degree, pairs[:, 0], 1)
    np.add.at(degree, pairs[:, 1], 1)
    return int(degree.max())
