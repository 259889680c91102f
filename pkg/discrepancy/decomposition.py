"""
边界单元分解
在格点坐标系中把矩形的差异度拆到与边界相交的单位单元上，并给出单条边的锯齿和
"""

import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Set, Tuple

from mpmath import mp

from config import config
from errors import DegeneratePositionError, DomainError
from numtheory import Real, to_fraction
from geometry import LatticeSpec, Point, Rectangle, clip_half_plane, polygon_area
from discrepancy.one_dim import ntheta_points, star_discrepancy_1d

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)

HalfPlane = Tuple[Fraction, Fraction, Fraction]


@dataclass(frozen=True)
class DecompositionCheck:
    direct: Fraction
    decomposed: Fraction
    corner_cells: int
    side_cells: int

    @property
    def residual(self) -> Fraction:
        return abs(self.direct - self.decomposed)


def _cell(n1: int, n2: int) -> List[Point]:
    """以格点 (n1, n2) 为中心的单位单元，逆时针"""
    x0, y0 = n1 - HALF, n2 - HALF
    return [(x0, y0), (x0 + 1, y0), (x0 + 1, y0 + 1), (x0, y0 + 1)]


def _lattice_quadrilateral(R: Rectangle, spec: LatticeSpec) -> List[Tuple[Fraction, Fraction]]:
    with mp.workprec(config.precision):
        quad = [tuple(to_fraction(z) for z in spec.to_lattice(x, y)) for x, y in R.vertices()]
    signed = sum(x1 * y2 - x2 * y1
                 for (x1, y1), (x2, y2) in zip(quad, quad[1:] + quad[:1]))
    if signed < 0:
        quad.reverse()
    return quad


def _half_planes(quad) -> List[HalfPlane]:
    """第 i 条边 v_i → v_{i+1} 左侧（内部）写成 a·x + b·y ≤ c"""
    planes = []
    for (x1, y1), (x2, y2) in zip(quad, quad[1:] + quad[:1]):
        dx, dy = x2 - x1, y2 - y1
        planes.append((dy, -dx, dy * x1 - dx * y1))
    return planes


def _inside(point, plane: HalfPlane) -> bool:
    a, b, c = plane
    return a * point[0] + b * point[1] <= c


def _segment_meets_box(p, q, x0, x1, y0, y1) -> bool:
    """Liang–Barsky，闭线段与闭矩形是否相交"""
    t0, t1 = Fraction(0), Fraction(1)
    dx, dy = q[0] - p[0], q[1] - p[1]
    for d, lo, hi, start in ((dx, x0, x1, p[0]), (dy, y0, y1, p[1])):
        if d == 0:
            if start < lo or start > hi:
                return False
            continue
        ta, tb = (lo - start) / d, (hi - start) / d
        if ta > tb:
            ta, tb = tb, ta
        t0, t1 = max(t0, ta), min(t1, tb)
        if t0 > t1:
            return False
    return True


def _cells_on_segment(p, q) -> Set[Tuple[int, int]]:
    n1_lo = math.floor(min(p[0], q[0]) + HALF)
    n1_hi = math.floor(max(p[0], q[0]) + HALF)
    n2_lo = math.floor(min(p[1], q[1]) + HALF)
    n2_hi = math.floor(max(p[1], q[1]) + HALF)
    cells = set()
    for n1 in range(n1_lo, n1_hi + 1):
        for n2 in range(n2_lo, n2_hi + 1):
            if _segment_meets_box(p, q, n1 - HALF, n1 + HALF, n2 - HALF, n2 + HALF):
                cells.add((n1, n2))
    return cells


def _count_interior(quad, planes) -> int:
    """Q 内的整点个数，整点落在边界上时报错"""
    ys = [y for _, y in quad]
    total = 0
    for j in range(math.ceil(min(ys)), math.floor(max(ys)) + 1):
        lower, upper = None, None
        for a, b, c in planes:
            rhs = c - b * j
            if a == 0:
                if rhs < 0:
                    lower, upper = Fraction(1), Fraction(0)
                    break
                if rhs == 0:
                    raise DegeneratePositionError(f"整点行 y={j} 落在边上")
                continue
            bound = rhs / a
            if a > 0:
                upper = bound if upper is None else min(upper, bound)
            else:
                lower = bound if lower is None else max(lower, bound)
        if lower is None or upper is None or lower > upper:
            continue
        for edge in (lower, upper):
            if edge.denominator == 1:
                raise DegeneratePositionError(f"整点 ({edge}, {j}) 落在边界上")
        total += max(0, math.floor(upper) - math.ceil(lower) + 1)
    return total


def square_decomposition_check(R: Rectangle, spec: LatticeSpec) -> DecompositionCheck:
    """
    D(R) 与边界单元分解之和的精确比较

    角单元（含顶点或与两条相邻边都相交）直接裁剪计算，
    其余边界单元用所交各边的半平面代替 R；两者之差应恰为 0

    Raises:
        DegeneratePositionError: 顶点落在单元边界上，或整点落在 R 的边界上
    """
    quad = _lattice_quadrilateral(R, spec)
    for x, y in quad:
        if (x - HALF).denominator == 1 or (y - HALF).denominator == 1:
            raise DegeneratePositionError(f"顶点 ({float(x)}, {float(y)}) 落在单元边界上")
    planes = _half_planes(quad)
    direct = _count_interior(quad, planes) - polygon_area(quad)

    touching: Dict[Tuple[int, int], Set[int]] = {}
    for i in range(4):
        for cell in _cells_on_segment(quad[i], quad[(i + 1) % 4]):
            touching.setdefault(cell, set()).add(i)
    corners = {(math.floor(x + HALF), math.floor(y + HALF)) for x, y in quad}

    decomposed = Fraction(0)
    corner_count = side_count = 0
    for (n1, n2), sides in touching.items():
        centre = (Fraction(n1), Fraction(n2))
        adjacent = any((i + 1) % 4 in sides for i in sides)
        if (n1, n2) in corners or adjacent:
            corner_count += 1
            piece = _cell(n1, n2)
            for plane in planes:
                piece = clip_half_plane(piece, *plane)
            inside = all(_inside(centre, plane) for plane in planes)
            decomposed += int(inside) - polygon_area(piece)
            continue
        side_count += 1
        for i in sides:
            piece = clip_half_plane(_cell(n1, n2), *planes[i])
            decomposed += int(_inside(centre, planes[i])) - polygon_area(piece)

    check = DecompositionCheck(Fraction(direct), decomposed, corner_count, side_count)
    logger.debug("边界分解: 角单元 %d，边单元 %d，残差 %s",
                 corner_count, side_count, check.residual)
    return check


# ---------------------------------------------------------------- 单边锯齿和

@dataclass(frozen=True)
class Side:
    """
    格点坐标中的直线 y = a2 + (x − a1)·slope

    below 表示区域在直线下方；closed 表示边界本身属于区域，
    缺省时按半开约定：下方区域不含边界，上方区域含边界
    """
    a1: Real
    a2: Real
    slope: Real
    below: bool = True
    closed: Optional[bool] = None

    def is_closed(self) -> bool:
        return (not self.below) if self.closed is None else self.closed


@dataclass(frozen=True)
class SideSum:
    sawtooth: Fraction
    direct: Fraction
    star_bound: float

    @property
    def difference(self) -> Fraction:
        return abs(self.sawtooth - self.direct)


def _sawtooth_one_sided(y: Fraction, left: bool) -> Fraction:
    """left 为真时在整数处取左极限 1/2，否则为通常的 −1/2"""
    if left:
        return y - math.ceil(y) + HALF
    return y - math.floor(y) - HALF


def _oriented(side: Side, shift):
    """|slope| > 1 时交换两个坐标，使每列至多穿过一格"""
    a1, a2, t = to_fraction(side.a1), to_fraction(side.a2), to_fraction(side.slope)
    w1, w2 = (to_fraction(w) for w in shift)
    below, closed = side.below, side.is_closed()
    if abs(t) > 1:
        a1, a2, t, w1, w2 = a2, a1, 1 / t, w2, w1
        if t > 0:
            below = not below
    return a1, a2, t, w1, w2, below, closed


def sawtooth_side_sum(side: Side, I: range, spec: LatticeSpec) -> SideSum:
    """
    ∓Σ_{n∈I} ψ(c + n·t) 与逐单元直接计数 Σ D(T* ∩ S(n))

    c = a2 − ω2 + (ω1 − a1)·t；I 为较平缓坐标方向上的列下标，
    边界上的格点按 Side 的约定取单侧极限
    """
    if len(I) == 0 or I.step != 1:
        raise DomainError("I 必须是非空的连续整数区间")
    a1, a2, t, w1, w2, below, closed = _oriented(side, spec.shift)
    c = a2 - w2 + (w1 - a1) * t
    left = below != closed
    sign = -1 if below else 1
    sawtooth = sign * sum((_sawtooth_one_sided(c + n * t, left) for n in I), Fraction(0))

    # a·x + b·y ≤ k 表示区域所在一侧
    if below:
        plane = (-t, Fraction(1), a2 - a1 * t)
    else:
        plane = (t, Fraction(-1), a1 * t - a2)
    direct = Fraction(0)
    for n in I:
        xc = n + w1
        yl = a2 + (xc - HALF - a1) * t
        yr = a2 + (xc + HALF - a1) * t
        lo = math.floor(min(yl, yr) - w2 + HALF) - 1
        hi = math.floor(max(yl, yr) - w2 + HALF) + 1
        for n2 in range(lo, hi + 1):
            yc = n2 + w2
            gap = plane[0] * xc + plane[1] * yc - plane[2]
            inside = gap <= 0 if closed else gap < 0
            cell = [(xc - HALF, yc - HALF), (xc + HALF, yc - HALF),
                    (xc + HALF, yc + HALF), (xc - HALF, yc + HALF)]
            direct += int(inside) - polygon_area(clip_half_plane(cell, *plane))

    points = ntheta_points(t, len(I), start=I.start)
    star_bound = 2.0 * float(star_discrepancy_1d(points))
    return SideSum(sawtooth, direct, star_bound)
