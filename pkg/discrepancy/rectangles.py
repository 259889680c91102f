"""
矩形差异度
单个矩形的差异度、按方向扫描的上确界以及矩形族
"""

import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from config import config
from errors import DomainError, RectangleOutsideError
from numtheory import Real
from direction_sets import DirectionSet, augment_with_axes, representatives
from geometry import UNIT_SQUARE, Point, Rectangle, rotate_points, vertical_chords
from pointsets import PointSet
from discrepancy.report import DirectionRecord, DiscrepancyReport

logger = logging.getLogger(__name__)

MODES = ("contained", "torus")
# 点数不超过该值时，所有点坐标都作为候选边
EXHAUSTIVE_LIMIT = 64
# 零宽见证矩形的最小边长
WITNESS_NUDGE = 2.0 ** -40


def rect_discrepancy(P: PointSet, R: Rectangle, mode: str = "contained") -> float:
    """
    D(P, R) = #(P ∩ R) − N·|R|

    torus 模式按 ℝ²/ℤ² 计数，R 的直径必须 ≤ 1
    """
    if mode not in MODES:
        raise DomainError(f"未知模式: {mode}")
    area = float(R.area)
    if mode == "contained":
        if not R.is_inside_unit_square():
            raise RectangleOutsideError(R.to_dict())
        count = int(np.count_nonzero(R.contains_array(P.xs, P.ys)))
        return count - P.N * area

    if R.diameter_sq > 1:
        raise DomainError("torus 模式要求 w² + h² ≤ 1")
    cx, cy = float(R.center[0]), float(R.center[1])
    base = R.translated(-math.floor(cx), -math.floor(cy))
    count = 0
    for a in (-1, 0, 1):
        for b in (-1, 0, 1):
            count += int(np.count_nonzero(base.contains_array(P.xs + a, P.ys + b)))
    return count - P.N * area


# ---------------------------------------------------------------- 扫描

def _candidate_keys(coords: np.ndarray, lo: float, hi: float, grid: int,
                    exhaustive: bool) -> Tuple[np.ndarray, np.ndarray]:
    """
    一个坐标轴上的候选边：(value, side)

    side = 1 表示 value 的右极限，"位于 key 之下" 即 ≤ value；side = 0 即 < value
    """
    ticks = lo + (hi - lo) * np.arange(grid + 1) / grid
    ordered = np.sort(coords)
    values = [ticks]
    sides = [np.zeros(len(ticks), dtype=np.int8)]
    idx = np.searchsorted(ordered, ticks, side="left")
    idx = np.unique(idx[idx < len(ordered)])
    nearest = ordered[idx]
    if exhaustive:
        nearest = np.unique(ordered)
    for side in (0, 1):
        values.append(nearest)
        sides.append(np.full(len(nearest), side, dtype=np.int8))
    values = np.concatenate(values)
    sides = np.concatenate(sides)
    order = np.lexsort((sides, values))
    values, sides = values[order], sides[order]
    keep = np.ones(len(values), dtype=bool)
    keep[1:] = (values[1:] != values[:-1]) | (sides[1:] != sides[:-1])
    return values[keep], sides[keep]


def _first_key_above(values: np.ndarray, sides: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """每个点第一个满足 "点位于 key 之下" 的 key 下标，不存在时为 len(values)"""
    a0 = np.searchsorted(values, coords, side="left")
    inside = a0 < len(values)
    hit = np.zeros(len(coords), dtype=bool)
    hit[inside] = (values[a0[inside]] == coords[inside]) & (sides[a0[inside]] == 0)
    return a0 + hit


def sup_discrepancy_direction(P: PointSet, theta: Real, resolution: int = 64,
                              region: Optional[Sequence[Point]] = None,
                              exhaustive_limit: int = EXHAUSTIVE_LIMIT) -> DirectionRecord:
    """
    固定方向 θ 的差异度上确界

    点与区域先旋转 −θ，候选边取分辨率网格加上各网格线之后的最近点坐标，
    二维累计计数后对每对竖边在所有横边上一次求最大最小值

    Args:
        P: 点集
        theta: 方向角
        resolution: 网格分辨率，实际取不小于它的 2 的幂
        region: 凸多边形区域，默认单位正方形
        exhaustive_limit: 点数不超过它时枚举全部点坐标

    Returns:
        DirectionRecord，见证矩形已旋转回原坐标
    """
    if resolution < 2:
        raise DomainError("resolution 必须 ≥ 2")
    if P.N == 0:
        raise DomainError("点集不能为空")
    grid = 1 << math.ceil(math.log2(resolution))
    poly = np.asarray(region if region is not None else UNIT_SQUARE, dtype=np.float64)
    us, vs = rotate_points(P.xs, P.ys, -float(theta))
    ru, rv = rotate_points(poly[:, 0], poly[:, 1], -float(theta))
    exhaustive = P.N <= exhaustive_limit

    u_val, u_side = _candidate_keys(us, ru.min(), ru.max(), grid, exhaustive)
    v_val, v_side = _candidate_keys(vs, rv.min(), rv.max(), grid, exhaustive)
    Ku, Kv = len(u_val), len(v_val)

    H = np.zeros((Ku + 1, Kv + 1), dtype=np.int64)
    np.add.at(H, (_first_key_above(u_val, u_side, us), _first_key_above(v_val, v_side, vs)), 1)
    C = H.cumsum(axis=0).cumsum(axis=1)[:Ku, :Kv].astype(np.float64)

    lo_u, hi_u = vertical_chords(list(zip(ru, rv)), u_val)
    # 区域右端点的右极限已越出区域
    lo_u = np.where((u_side == 1) & (u_val >= ru.max()), np.inf, lo_u)

    N = float(P.N)
    best = -1.0
    witness = None
    for j in range(Ku - 1):
        ks = np.arange(j + 1, Ku)
        width = u_val[ks] - u_val[j]
        vlo = np.maximum(lo_u[j], lo_u[ks])[:, None]
        vhi = np.minimum(hi_u[j], hi_u[ks])[:, None]
        allowed = (v_val[None, :] >= vlo) & (
            (v_val[None, :] < vhi) | ((v_val[None, :] == vhi) & (v_side[None, :] == 0)))
        F = C[ks, :] - C[j, :][None, :] - N * width[:, None] * v_val[None, :]
        fmax = np.where(allowed, F, -np.inf)
        fmin = np.where(allowed, F, np.inf)
        imax, imin = fmax.argmax(axis=1), fmin.argmin(axis=1)
        rows = np.arange(len(ks))
        spread = fmax[rows, imax] - fmin[rows, imin]
        spread = np.where(np.isfinite(spread), spread, -1.0)
        r = int(spread.argmax())
        if spread[r] > best:
            best = float(spread[r])
            witness = (u_val[j], u_val[ks[r]], v_val[imin[r]], v_val[imax[r]])

    return DirectionRecord(float(theta), max(best, 0.0), _witness(witness, float(theta)))


def _witness(bounds, theta: float) -> Optional[Rectangle]:
    if bounds is None:
        return None
    u0, u1, va, vb = (float(b) for b in bounds)
    v0, v1 = min(va, vb), max(va, vb)
    cu, cv = (u0 + u1) / 2, (v0 + v1) / 2
    cx, cy = rotate_points(np.array([cu]), np.array([cv]), theta)
    return Rectangle((float(cx[0]), float(cy[0])), max(u1 - u0, WITNESS_NUDGE),
                     max(v1 - v0, WITNESS_NUDGE), theta % math.pi)


def sup_discrepancy(P: PointSet, omega: DirectionSet, budget: int = 64,
                    resolution: int = 64) -> DiscrepancyReport:
    """
    Ω ∪ (Ω + π/2) 的代表方向上逐个求上确界，汇总为 DiscrepancyReport

    代表方向数受 budget 限制；多线程时并行，结果按方向下标排列
    """
    directions = representatives(augment_with_axes(omega), budget)
    logger.info("N=%d: 扫描 %d 个方向，分辨率 %d", P.N, len(directions), resolution)

    def work(theta):
        return sup_discrepancy_direction(P, theta, resolution)

    if config.workers > 1 and len(directions) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(work, directions))
    else:
        records = [work(theta) for theta in directions]
    return DiscrepancyReport(records, P.meta, resolution=resolution, budget=budget, N=P.N)


# ---------------------------------------------------------------- 矩形族

@dataclass(frozen=True)
class RectangleFamilySpec:
    """
    有限矩形族：方向 × 宽 × 高 × 中心网格，作为 L² 度量的均匀测度

    contained 模式跳过越出单位正方形的矩形
    """
    directions: Tuple[float, ...]
    widths: Tuple[float, ...]
    heights: Tuple[float, ...]
    anchors: Tuple[float, ...] = (0.25, 0.5, 0.75)
    mode: str = "torus"

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"未知模式: {self.mode}")
        if not (self.directions and self.widths and self.heights and self.anchors):
            raise DomainError("矩形族的各个维度都不能为空")
        if min(self.widths) <= 0 or min(self.heights) <= 0:
            raise DomainError("矩形边长必须为正")
        if self.mode == "torus" and max(self.widths) ** 2 + max(self.heights) ** 2 > 1:
            raise DomainError("torus 模式要求 w² + h² ≤ 1")

    @classmethod
    def geometric(cls, directions: Sequence[Real], w_min: float, w_max: float,
                  steps: int, anchors: Sequence[float] = (0.25, 0.5, 0.75),
                  mode: str = "torus") -> "RectangleFamilySpec":
        """宽与高取 [w_min, w_max] 上 steps 个几何等比值"""
        if steps < 1 or not 0 < w_min <= w_max:
            raise DomainError("几何网格参数无效")
        sizes = tuple(float(v) for v in np.geomspace(w_min, w_max, steps))
        return cls(tuple(float(d) for d in directions), sizes, sizes,
                   tuple(float(a) for a in anchors), mode)

    def rectangles(self) -> Iterator[Rectangle]:
        for theta in self.directions:
            phi = theta % math.pi
            for w in self.widths:
                for h in self.heights:
                    for cx in self.anchors:
                        for cy in self.anchors:
                            R = Rectangle((cx, cy), w, h, phi)
                            if self.mode == "contained" and not R.is_inside_unit_square():
                                continue
                            yield R

    def size(self) -> int:
        return sum(1 for _ in self.rectangles())

    def mean_square(self, P: PointSet) -> float:
        """族上均匀平均的 D(P, R)²"""
        values = np.array([rect_discrepancy(P, R, self.mode) for R in self.rectangles()])
        if len(values) == 0:
            raise DomainError("矩形族为空")
        return float(np.mean(values ** 2))

    def to_dict(self) -> dict:
        return {"directions": list(self.directions), "widths": list(self.widths),
                "heights": list(self.heights), "anchors": list(self.anchors),
                "mode": self.mode}
