"""Planar primitives: δ-balls, δ-tubes and the predicates between them."""
import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np
import shapely
from shapely.geometry import Polygon

from inclab.config import settings
from inclab.core.error_codes import BusinessException, ErrorCode


logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2


def resolve_tolerance(tol: Optional[float]) -> float:
    """Explicit tolerance, or the configured default."""
    return settings.INCLAB_TOLERANCE if tol is None else float(tol)


def normalize_angle(theta):
    """Reduce direction angles into [0, π)."""
    reduced = np.mod(theta, math.pi)
    reduced = np.where(reduced >= math.pi, 0.0, reduced)
    if np.ndim(reduced) == 0:
        return float(reduced)
    return reduced


@dataclass(frozen=True)
class Scale:
    """Working scale δ = 2^-k, D = 2^k."""

    k: int

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, (int, np.integer)):
            raise BusinessException(ErrorCode.INVALID_SCALE, f"k must be an integer, got {self.k!r}")
        if not 1 <= self.k <= settings.INCLAB_MAX_K:
            raise BusinessException(ErrorCode.INVALID_SCALE, f"k={self.k}, allowed 1..{settings.INCLAB_MAX_K}")
        object.__setattr__(self, "k", int(self.k))

    @property
    def delta(self) -> float:
        return math.ldexp(1.0, -self.k)

    @property
    def D(self) -> int:
        return 1 << self.k


@dataclass(frozen=True)
class Ball:
    cx: float
    cy: float
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise BusinessException(ErrorCode.INVALID_INPUT, f"ball radius must be positive, got {self.r}")


@dataclass(frozen=True)
class Tube:
    """Closed width × length rectangle; theta is the direction of the long side, mod π."""

    cx: float
    cy: float
    theta: float
    width: float
    length: float = 1.0

    def __post_init__(self):
        if not 0 < self.width <= self.length:
            raise BusinessException(
                ErrorCode.INVALID_INPUT, f"tube needs 0 < width <= length, got {self.width} x {self.length}"
            )
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    def corners(self) -> np.ndarray:
        return tube_corners(self.cx, self.cy, self.theta, self.width, self.length)

    def polygon(self) -> Polygon:
        return Polygon(self.corners())

    def thickened(self, factor: float) -> "Tube":
        return Tube(self.cx, self.cy, self.theta, self.width * factor, max(self.length, self.width * factor))


@dataclass(frozen=True)
class Square:
    """Closed axis-aligned square with lower-left corner (x0, y0)."""

    x0: float
    y0: float
    side: float


def tube_corners(cx, cy, theta, width, length) -> np.ndarray:
    """Corners in counter-clockwise order; shape (4, 2), or (n, 4, 2) for array input."""
    cx, cy, theta = np.asarray(cx, float), np.asarray(cy, float), np.asarray(theta, float)
    c, s = np.cos(theta), np.sin(theta)
    hl, hw = np.asarray(length, float) / 2, np.asarray(width, float) / 2
    signs = ((1, 1), (-1, 1), (-1, -1), (1, -1))
    pts = [
        np.stack([cx + a * hl * c - b * hw * s, cy + a * hl * s + b * hw * c], axis=-1)
        for a, b in signs
    ]
    return np.stack(pts, axis=-2)


def to_tube_frame(px, py, cx, cy, theta):
    """Coordinates of points in a tube frame: u along the tube, v across it."""
    dx, dy = np.subtract(px, cx), np.subtract(py, cy)
    c, s = np.cos(theta), np.sin(theta)
    return dx * c + dy * s, -dx * s + dy * c


def ball_tube_distance(bx, by, tx, ty, theta, width, length):
    """Distance from ball centers to closed tube rectangles (broadcasting)."""
    u, v = to_tube_frame(bx, by, tx, ty, theta)
    du = np.maximum(np.abs(u) - np.divide(length, 2), 0.0)
    dv = np.maximum(np.abs(v) - np.divide(width, 2), 0.0)
    return np.hypot(du, dv)


def incidence_mask(centers, radius, tubes, width, length, tol: Optional[float] = None) -> np.ndarray:
    """Boolean (n_balls, n_tubes) matrix of ball/tube intersections."""
    tol = resolve_tolerance(tol)
    centers = np.asarray(centers, float).reshape(-1, 2)
    tubes = np.asarray(tubes, float).reshape(-1, 3)
    dist = ball_tube_distance(
        centers[:, 0:1], centers[:, 1:2], tubes[None, :, 0], tubes[None, :, 1], tubes[None, :, 2], width, length
    )
    return dist <= radius * (1.0 + tol)


def ball_tube_intersects(p: Ball, t: Tube, tol: Optional[float] = None) -> bool:
    tol = resolve_tolerance(tol)
    dist = ball_tube_distance(p.cx, p.cy, t.cx, t.cy, t.theta, t.width, t.length)
    return bool(dist <= p.r * (1.0 + tol))


def angle_between(theta_a, theta_b):
    """Acute angle between directions given mod π."""
    d = np.mod(np.abs(np.subtract(theta_a, theta_b)), math.pi)
    out = np.minimum(d, math.pi - d)
    if np.ndim(out) == 0:
        return float(out)
    return out


def tube_angle(s: Tube, t: Tube) -> float:
    return angle_between(s.theta, t.theta)


def tube_in_query_tube(t: Tube, T: Tube, tol: Optional[float] = None) -> bool:
    """All four corners of t inside the closed rectangle of T."""
    tol = resolve_tolerance(tol)
    corners = t.corners()
    u, v = to_tube_frame(corners[:, 0], corners[:, 1], T.cx, T.cy, T.theta)
    return bool(
        np.all(np.abs(u) <= T.length / 2 * (1.0 + tol)) and np.all(np.abs(v) <= T.width / 2 * (1.0 + tol))
    )


def ball_in_ball(p: Ball, B: Ball, tol: Optional[float] = None) -> bool:
    tol = resolve_tolerance(tol)
    return bool(math.hypot(p.cx - B.cx, p.cy - B.cy) <= (B.r - p.r) + tol * B.r)


def ball_in_square(p: Ball, Q: Square, tol: Optional[float] = None) -> bool:
    tol = resolve_tolerance(tol)
    slack = tol * Q.side
    return (
        p.cx - p.r >= Q.x0 - slack
        and p.cx + p.r <= Q.x0 + Q.side + slack
        and p.cy - p.r >= Q.y0 - slack
        and p.cy + p.r <= Q.y0 + Q.side + slack
    )


def essential_overlap(s: Tube, t: Tube) -> float:
    """area(s ∩ t) / area(t) by convex clipping of the two rectangles."""
    area = s.polygon().intersection(t.polygon()).area
    return float(min(1.0, area / (t.width * t.length)))


def overlap_fractions(tubes_a, tubes_b, width: float, length: float) -> np.ndarray:
    """Pairwise essential overlap for aligned rows of two (n, 3) tube arrays."""
    tubes_a = np.asarray(tubes_a, float).reshape(-1, 3)
    tubes_b = np.asarray(tubes_b, float).reshape(-1, 3)
    if tubes_a.shape[0] == 0:
        return np.zeros(0)
    polys_a = tube_polygons(tubes_a, width, length)
    polys_b = tube_polygons(tubes_b, width, length)
    areas = shapely.area(shapely.intersection(polys_a, polys_b))
    return np.minimum(1.0, areas / (width * length))


def tube_polygons(tubes: np.ndarray, width: float, length: float) -> np.ndarray:
    corners = tube_corners(tubes[:, 0], tubes[:, 1], tubes[:, 2], width, length)
    rings = np.concatenate([corners, corners[:, :1, :]], axis=1)
    return shapely.polygons(rings)


def rotate_points(points, angle: float, about=(0.5, 0.5)) -> np.ndarray:
    points = np.asarray(points, float).reshape(-1, 2)
    c, s = math.cos(angle), math.sin(angle)
    shifted = points - np.asarray(about, float)
    rotated = np.stack([shifted[:, 0] * c - shifted[:, 1] * s, shifted[:, 0] * s + shifted[:, 1] * c], axis=1)
    return rotated + np.asarray(about, float)


@dataclass
class Configuration:
    """
    Paired ball set and tube set at a common scale.

    Balls are stored as an (n, 2) center array with a shared radius, tubes as an
    (m, 3) array of (cx, cy, theta) with shared width and length.
    """

    scale: Scale
    ball_centers: np.ndarray
    tube_params: np.ndarray
    ball_radius: float
    tube_width: float
    tube_length: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.ball_centers = np.asarray(self.ball_centers, dtype=float).reshape(-1, 2)
        tubes = np.array(self.tube_params, dtype=float).reshape(-1, 3)
        if tubes.shape[0]:
            tubes[:, 2] = normalize_angle(tubes[:, 2])
        self.tube_params = tubes
        if not self.ball_radius > 0 or not 0 < self.tube_width <= self.tube_length:
            raise BusinessException(
                ErrorCode.INVALID_INPUT,
                f"radius={self.ball_radius}, width={self.tube_width}, length={self.tube_length}",
            )

    @classmethod
    def at_scale(cls, scale: Scale, ball_centers, tube_params, meta: dict = None, tube_length: float = 1.0):
        return cls(scale, ball_centers, tube_params, scale.delta, scale.delta, tube_length, dict(meta or {}))

    @property
    def n_balls(self) -> int:
        return int(self.ball_centers.shape[0])

    @property
    def n_tubes(self) -> int:
        return int(self.tube_params.shape[0])

    @property
    def thickening(self) -> int:
        return int(self.meta.get("thickening", 1))

    def ball(self, i: int) -> Ball:
        cx, cy = self.ball_centers[i]
        return Ball(float(cx), float(cy), self.ball_radius)

    def tube(self, i: int) -> Tube:
        cx, cy, theta = self.tube_params[i]
        return Tube(float(cx), float(cy), float(theta), self.tube_width, self.tube_length)

    def balls(self) -> Iterator[Ball]:
        for i in range(self.n_balls):
            yield self.ball(i)

    def tubes(self) -> Iterator[Tube]:
        for i in range(self.n_tubes):
            yield self.tube(i)

    def rotated(self, angle: float, about=(0.5, 0.5)) -> "Configuration":
        centers = rotate_points(self.ball_centers, angle, about)
        tubes = self.tube_params.copy()
        if tubes.shape[0]:
            tubes[:, :2] = rotate_points(tubes[:, :2], angle, about)
            tubes[:, 2] = tubes[:, 2] + angle
        meta = dict(self.meta, rotation=float(self.meta.get("rotation", 0.0)) + angle)
        return Configuration(
            self.scale, centers, tubes, self.ball_radius, self.tube_width, self.tube_length, meta
        )

    def check_size(self, limit: Optional[int] = None) -> None:
        limit = settings.INCLAB_MAX_OBJECTS if limit is None else limit
        if self.n_balls > limit or self.n_tubes > limit:
            raise BusinessException(
                ErrorCode.SIZE_GUARD_EXCEEDED, f"|P|={self.n_balls}, |T|={self.n_tubes}, limit={limit}"
            )
