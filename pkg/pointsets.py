"""
点集模块
旋转格点、平移旋转格点、随机基线点集以及格点计数
"""

import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
import mpmath
from mpmath import mp

from config import config
from errors import DomainError
from numtheory import Real, to_fraction
from geometry import LatticeSpec, Rectangle

logger = logging.getLogger(__name__)

CENTRE = (0.5, 0.5)
# 1.0 以下最大的 float，坐标舍入到 1.0 时回退到它
_BELOW_ONE = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class PointSetMeta:
    generator: str
    slope: Optional[Fraction] = None
    shift: Tuple[float, float] = (0.0, 0.0)
    scale: float = 1.0
    # 调整前的格点个数与增删个数
    pre_count: int = 0
    adjustment: int = 0
    seed: Optional[int] = None


@dataclass
class PointSet:
    """[0,1)² 中的 N 个点，points 为 (N, 2) float64 数组"""
    points: np.ndarray
    meta: PointSetMeta = field(default_factory=lambda: PointSetMeta("explicit"))

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, 2)
        if len(self.points) and ((self.points < 0).any() or (self.points >= 1).any()):
            raise DomainError("点坐标必须位于 [0, 1)")

    @property
    def N(self) -> int:
        return len(self.points)

    @property
    def xs(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def ys(self) -> np.ndarray:
        return self.points[:, 1]

    @classmethod
    def from_points(cls, points, generator: str = "explicit") -> "PointSet":
        return cls(np.asarray(points, dtype=np.float64), PointSetMeta(generator))


def _unit_float(value) -> float:
    x = float(value)
    return _BELOW_ONE if x >= 1.0 else x


def _scale_for(N: int) -> Real:
    root = math.isqrt(N)
    if root * root == N:
        return Fraction(root)
    with mp.workprec(config.precision):
        return mpmath.sqrt(N)


def _reduce_shift(shift: Tuple[Real, Real]) -> Tuple[Fraction, Fraction]:
    """ω 模 1 约化，保持精确"""
    return tuple(to_fraction(w) - math.floor(to_fraction(w)) for w in shift)


def dyadic_centres(limit: int) -> List[Tuple[float, float]]:
    """逐层二进细分的单元中心，层内按行优先，至多 limit 个"""
    result = []
    level = 1
    while len(result) < limit:
        cells = 1 << (level - 1)
        step = 1.0 / (1 << level)
        for b in range(cells):
            for a in range(cells):
                result.append(((2 * a + 1) * step, (2 * b + 1) * step))
        level += 1
    return result


def _adjust(points: List[Tuple[float, float]], N: int) -> List[Tuple[float, float]]:
    """
    增删到恰好 N 个点

    删除离 (1/2, 1/2) 最远的点（按坐标字典序打破平局），
    补点取尚未占用的二进细分中心
    """
    count = len(points)
    if count > N:
        ranked = sorted(range(count), key=lambda k: (-((points[k][0] - CENTRE[0]) ** 2
                                                       + (points[k][1] - CENTRE[1]) ** 2),
                                                     points[k][0], points[k][1]))
        drop = set(ranked[:count - N])
        return [p for k, p in enumerate(points) if k not in drop]
    if count < N:
        occupied = set(points)
        extra = []
        for centre in dyadic_centres(N + count):
            if centre not in occupied:
                extra.append(centre)
                occupied.add(centre)
            if len(extra) == N - count:
                break
        return points + extra
    return points


def lattice_points_in_unit_square(spec: LatticeSpec) -> List[Tuple[float, float]]:
    """格点与 [0,1)² 的交，按格点坐标行优先"""
    square = Rectangle.axis_aligned(0, 1, 0, 1)
    result = []
    with mp.workprec(config.precision):
        for j, first, last in spec.rows(square):
            for i in range(first, last + 1):
                x, y = spec.from_lattice(i, j)
                result.append((_unit_float(x), _unit_float(y)))
    return result


def shifted_rotated_lattice(N: int, slope: Real, shift: Tuple[Real, Real]) -> PointSet:
    """
    (ω + ℤ²)/N^{1/2} 绕原点逆时针旋转 arctan(slope) 后与 [0,1)² 的交，再调整到 N 个点

    Args:
        N: 点数
        slope: 旋转角的正切（精确有理数）
        shift: 平移 ω，按模 1 约化

    Returns:
        PointSet
    """
    if N < 1:
        raise DomainError("N 必须 ≥ 1")
    slope = to_fraction(slope)
    omega = _reduce_shift(shift)
    spec = LatticeSpec(slope, _scale_for(N), omega)
    raw = lattice_points_in_unit_square(spec)
    points = _adjust(raw, N)
    adjustment = abs(len(raw) - N)
    generator = "rotated" if omega == (0, 0) else "shifted"
    logger.info("%s 格点 N=%d: 交集 %d 个点，调整 %d 个", generator, N, len(raw), adjustment)
    meta = PointSetMeta(generator, slope, (float(omega[0]), float(omega[1])),
                        float(spec.scale), len(raw), adjustment)
    return PointSet(np.array(points, dtype=np.float64), meta)


def rotated_lattice(N: int, slope: Real) -> PointSet:
    return shifted_rotated_lattice(N, slope, (0, 0))


def random_points(N: int, seed: int) -> PointSet:
    """numpy PCG64 生成的 N 个独立均匀点"""
    if N < 1:
        raise DomainError("N 必须 ≥ 1")
    rng = np.random.default_rng(seed)
    points = rng.random((N, 2))
    return PointSet(points, PointSetMeta("random", seed=seed, pre_count=N))


def lattice_count_in_rect(spec: LatticeSpec, R: Rectangle) -> int:
    """格点在 R 内的精确个数（逐行整数区间）"""
    return spec.count_in_rect(R)
