"""Deterministic discrete Cantor sets and the cross-shaped product sets built on them."""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from inclab.core.error_codes import BusinessException, ErrorCode
from inclab.engine.geometry import Scale, Tube, incidence_mask


logger = logging.getLogger(__name__)

# Frostman constants checked for every generated set.
UPPER_CONSTANT = 4.0
LOWER_CONSTANT = 0.25

_CEIL_EPS = 1e-9


def survivors_at(j: int, s: float) -> int:
    """Number of surviving dyadic intervals at level j: min(2^j, ⌈2^{js}⌉)."""
    if j == 0:
        return 1
    return min(1 << j, math.ceil(2.0 ** (j * s) - _CEIL_EPS))


@dataclass
class DiscreteCantor:
    scale: Scale
    s: float
    points: list[int]
    n_intervals: int

    @property
    def positions(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float) * self.scale.delta

    def __len__(self) -> int:
        return len(self.points)


def cantor_generate(k: int, s: float) -> DiscreteCantor:
    """
    Refine [0, 1] level by level, keeping N_j surviving dyadic intervals.

    Each surviving node carries the number of level-k descendants it will
    have. Going down a level, the N_{j+1} − N_j heaviest nodes (leftmost first
    on ties) split their weight between both children, left child taking the
    larger half; every other node keeps only its left child. The leftmost chain
    therefore always survives, which puts 0 in the set; D is appended.
    """
    scale = Scale(k)
    if not 0.0 <= s <= 1.0:
        raise BusinessException(ErrorCode.INVALID_EXPONENT, f"s={s} not in [0, 1]")

    index = np.zeros(1, dtype=np.int64)
    weight = np.array([survivors_at(k, s)], dtype=np.int64)
    for j in range(k):
        n_split = survivors_at(j + 1, s) - survivors_at(j, s)
        # stable sort on -weight keeps leftmost first among equal weights
        order = np.argsort(-weight, kind="stable")
        split = np.zeros(index.size, dtype=bool)
        split[order[:n_split]] = True
        split &= weight >= 2

        left_weight = np.where(split, (weight + 1) // 2, weight)
        right_weight = weight // 2
        next_index = np.concatenate([2 * index, 2 * index[split] + 1])
        next_weight = np.concatenate([left_weight, right_weight[split]])
        order = np.argsort(next_index, kind="stable")
        index, weight = next_index[order], next_weight[order]

    points = sorted(set(int(m) for m in index) | {scale.D})
    logger.debug("cantor k=%d s=%.3f intervals=%d", k, s, index.size)
    return DiscreteCantor(scale, float(s), points, int(index.size))


@dataclass
class FrostmanReport:
    """Worst dyadic-interval and prefix counts relative to (d/δ)^s, per level."""

    max_upper_ratio: float
    min_lower_ratio: float
    size_ratio: float
    levels: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.max_upper_ratio <= UPPER_CONSTANT
            and self.min_lower_ratio >= LOWER_CONSTANT
            and 0.5 <= self.size_ratio <= UPPER_CONSTANT
        )


def frostman_report(c: DiscreteCantor) -> FrostmanReport:
    """Exhaustive scan of every dyadic interval of length ≥ δ."""
    k, D = c.scale.k, c.scale.D
    pts = np.asarray(c.points, dtype=np.int64)
    levels = []
    worst_upper, worst_lower = 0.0, math.inf
    for j in range(k + 1):
        cells = D >> j
        target = float(cells) ** c.s
        if j == 0:
            # [0, 1] is closed
            top = pts.size
        else:
            # half-open [i·d, (i+1)·d)
            inner = pts[pts < D]
            top = int(np.bincount(inner // cells).max()) if inner.size else 0
        prefix = int(np.count_nonzero(pts <= cells))
        worst_upper = max(worst_upper, top / target)
        worst_lower = min(worst_lower, prefix / target)
        levels.append({"level": j, "max_count": top, "prefix_count": prefix, "target": target})
    return FrostmanReport(worst_upper, worst_lower, len(c.points) / float(D) ** c.s, levels)


@dataclass
class ProductSet:
    """Balls of radius δ at (x0 + mδ, y0 + nδ), 1 ≤ m, n < w/δ, m or n in the rescaled Cantor set."""

    scale: Scale
    side: float
    s: float
    centers: np.ndarray
    x0: float = 0.0
    y0: float = 0.0

    def __len__(self) -> int:
        return int(self.centers.shape[0])

    def translated(self, x0: float, y0: float) -> "ProductSet":
        return ProductSet(self.scale, self.side, self.s, self.centers + np.array([x0 - self.x0, y0 - self.y0]), x0, y0)


def build_Pw(k: int, w: float, s: float, x0: float = 0.0, y0: float = 0.0) -> ProductSet:
    scale = Scale(k)
    n = w / scale.delta
    if not (1.0 <= n <= scale.D) or abs(n / 2 - round(n / 2)) > 1e-9:
        raise BusinessException(ErrorCode.INVALID_SIDE, f"w={w} is not a multiple of 2δ in [δ, 1]")
    n = int(round(n))
    level = max(1, math.ceil(math.log2(n)))
    base = cantor_generate(level, s)
    marks = {int(m * n // (1 << level)) for m in base.points} | {1}
    marks = np.array(sorted(m for m in marks if 1 <= m < n), dtype=np.int64)

    grid = np.arange(1, n)
    mm, nn = np.meshgrid(grid, grid, indexing="ij")
    keep = np.isin(mm, marks) | np.isin(nn, marks)
    centers = np.stack([mm[keep], nn[keep]], axis=1).astype(float) * scale.delta
    centers += np.array([x0, y0])
    return ProductSet(scale, float(w), float(s), centers, float(x0), float(y0))


def tube_hits_Pw(t: Tube, Pw: ProductSet) -> int:
    """Number of product-set balls meeting t."""
    if len(Pw) == 0:
        return 0
    mask = incidence_mask(Pw.centers, Pw.scale.delta, np.array([[t.cx, t.cy, t.theta]]), t.width, t.length)
    return int(np.count_nonzero(mask))
