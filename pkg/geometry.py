"""
几何模块
带方向的矩形、多边形裁剪与面积、旋转以及格点坐标系（LatticeSpec）
"""

import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
import mpmath
from mpmath import mp, mpf

from config import config
from errors import DomainError
from numtheory import Real, to_fraction, to_mpf

logger = logging.getLogger(__name__)

Point = Tuple[Real, Real]

UNIT_SQUARE: Tuple[Point, ...] = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))


def _cos_sin(phi: Real) -> Tuple[Real, Real]:
    """φ = 0 时返回精确的 (1, 0)，其余用 mpf"""
    if phi == 0:
        return Fraction(1), Fraction(0)
    phi = to_mpf(phi)
    return mpmath.cos(phi), mpmath.sin(phi)


def _same_kind(*values: Real) -> Tuple[Real, ...]:
    """全为精确有理数时保持 Fraction，否则统一为 mpf"""
    if all(isinstance(v, (int, Fraction)) for v in values):
        return tuple(Fraction(v) for v in values)
    return tuple(to_mpf(v) for v in values)


@dataclass(frozen=True)
class Rectangle:
    """
    中心 center、宽 width、高 height、方向 φ ∈ [0, π) 的矩形

    contains 在矩形自身坐标系中使用半开约定：左边与下边包含在内
    """
    center: Tuple[Real, Real]
    width: Real
    height: Real
    phi: Real = 0

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise DomainError(f"矩形边长必须为正，得到 {self.width}×{self.height}")

    @classmethod
    def axis_aligned(cls, x0: Real, x1: Real, y0: Real, y1: Real) -> "Rectangle":
        """[x0, x1) × [y0, y1)"""
        x0, x1, y0, y1 = _same_kind(x0, x1, y0, y1)
        return cls(((x0 + x1) / 2, (y0 + y1) / 2), x1 - x0, y1 - y0, 0)

    @property
    def area(self) -> Real:
        return self.width * self.height

    @property
    def diameter_sq(self) -> Real:
        return self.width ** 2 + self.height ** 2

    def local(self, x: Real, y: Real) -> Tuple[Real, Real]:
        """点在矩形坐标系中的坐标 (u, v)，原点为中心"""
        c, s = _cos_sin(self.phi)
        cx, cy, x, y, c, s = _same_kind(self.center[0], self.center[1], x, y, c, s)
        dx, dy = x - cx, y - cy
        return c * dx + s * dy, -s * dx + c * dy

    def contains(self, x: Real, y: Real) -> bool:
        c, s = _cos_sin(self.phi)
        cx, cy, x, y, c, s, w, h = _same_kind(self.center[0], self.center[1], x, y, c, s,
                                              self.width, self.height)
        dx, dy = x - cx, y - cy
        u, v = c * dx + s * dy, -s * dx + c * dy
        return -w / 2 <= u < w / 2 and -h / 2 <= v < h / 2

    def contains_array(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """float64 向量化版本"""
        phi = float(self.phi)
        c, s = math.cos(phi), math.sin(phi)
        dx = xs - float(self.center[0])
        dy = ys - float(self.center[1])
        u = c * dx + s * dy
        v = -s * dx + c * dy
        hw, hh = float(self.width) / 2, float(self.height) / 2
        return (u >= -hw) & (u < hw) & (v >= -hh) & (v < hh)

    def vertices(self) -> List[Point]:
        """逆时针四个顶点，从 (−w/2, −h/2) 角开始"""
        c, s = _cos_sin(self.phi)
        cx, cy, w, h, c, s = _same_kind(self.center[0], self.center[1],
                                        self.width, self.height, c, s)
        result = []
        for a, b in ((-1, -1), (1, -1), (1, 1), (-1, 1)):
            u, v = a * w / 2, b * h / 2
            result.append((cx + c * u - s * v, cy + s * u + c * v))
        return result

    def is_inside_unit_square(self) -> bool:
        return all(0 <= x <= 1 and 0 <= y <= 1 for x, y in self.vertices())

    def translated(self, dx: Real, dy: Real) -> "Rectangle":
        return Rectangle((self.center[0] + dx, self.center[1] + dy),
                         self.width, self.height, self.phi)

    def to_dict(self) -> dict:
        return {"cx": float(self.center[0]), "cy": float(self.center[1]),
                "w": float(self.width), "h": float(self.height), "phi": float(self.phi)}


# ---------------------------------------------------------------- 多边形

def polygon_area(poly: Sequence[Point]) -> Real:
    """鞋带公式（绝对值），精确有理输入给出精确结果"""
    if len(poly) < 3:
        return 0
    total = 0
    for (x1, y1), (x2, y2) in zip(poly, list(poly[1:]) + [poly[0]]):
        total += x1 * y2 - x2 * y1
    return abs(total) / 2


def clip_half_plane(poly: Sequence[Point], a: Real, b: Real, c: Real) -> List[Point]:
    """Sutherland–Hodgman：保留 a·x + b·y ≤ c 的部分"""
    result: List[Point] = []
    if not poly:
        return result
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = a * p[0] + b * p[1] - c
        fq = a * q[0] + b * q[1] - c
        if fp <= 0:
            result.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            t = fp / (fp - fq)
            result.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return result


def clip_to_box(poly: Sequence[Point], x0: Real, x1: Real, y0: Real, y1: Real) -> List[Point]:
    poly = clip_half_plane(poly, 1, 0, x1)
    poly = clip_half_plane(poly, -1, 0, -x0)
    poly = clip_half_plane(poly, 0, 1, y1)
    return clip_half_plane(poly, 0, -1, -y0)


def rotate_points(xs: np.ndarray, ys: np.ndarray, angle: Real) -> Tuple[np.ndarray, np.ndarray]:
    """逆时针旋转 angle（float64）"""
    a = float(angle)
    c, s = (1.0, 0.0) if a == 0.0 else (math.cos(a), math.sin(a))
    return c * xs - s * ys, s * xs + c * ys


def vertical_chords(poly: Sequence[Point], us: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    凸多边形被竖直线 x = u 截得的弦 [lo(u), hi(u)]

    u 在多边形横向范围外时 lo = +inf、hi = −inf
    """
    pts = np.asarray(poly, dtype=np.float64)
    lo = np.full(us.shape, np.inf)
    hi = np.full(us.shape, -np.inf)
    n = len(pts)
    for i in range(n):
        (x1, y1), (x2, y2) = pts[i], pts[(i + 1) % n]
        if x1 == x2:
            inside = us == x1
            lo = np.where(inside, np.minimum(lo, min(y1, y2)), lo)
            hi = np.where(inside, np.maximum(hi, max(y1, y2)), hi)
            continue
        a, b = min(x1, x2), max(x1, x2)
        inside = (us >= a) & (us <= b)
        t = (us - x1) / (x2 - x1)
        y = y1 + t * (y2 - y1)
        lo = np.where(inside, np.minimum(lo, y), lo)
        hi = np.where(inside, np.maximum(hi, y), hi)
    return lo, hi


# ---------------------------------------------------------------- 格点坐标系

@dataclass(frozen=True)
class LatticeSpec:
    """
    格点 {Rot(α)·(m + ω)/scale : m ∈ ℤ²}，tan α = slope

    scale 通常取 N^{1/2}；ω 为平移，在缩放与旋转之前作用
    """
    slope: Fraction
    scale: Real = 1
    shift: Tuple[Real, Real] = (0, 0)

    def __post_init__(self):
        object.__setattr__(self, "slope", to_fraction(self.slope))
        if not self.scale > 0:
            raise DomainError(f"scale 必须为正，得到 {self.scale}")

    def cos_sin(self) -> Tuple[Real, Real]:
        if self.slope == 0:
            return Fraction(1), Fraction(0)
        t = to_mpf(self.slope)
        c = 1 / mpmath.sqrt(1 + t * t)
        return c, t * c

    @property
    def angle(self) -> mpf:
        return mpmath.atan(to_mpf(self.slope))

    def to_lattice(self, x: Real, y: Real) -> Tuple[Real, Real]:
        """z = scale·Rot(−α)·x − ω"""
        c, s = self.cos_sin()
        c, s, k, x, y, w1, w2 = _same_kind(c, s, self.scale, x, y, *self.shift)
        return k * (c * x + s * y) - w1, k * (-s * x + c * y) - w2

    def from_lattice(self, i: Real, j: Real) -> Tuple[Real, Real]:
        """格点坐标 (i, j) 对应的平面点 Rot(α)·((i, j) + ω)/scale"""
        c, s = self.cos_sin()
        c, s, k, i, j, w1, w2 = _same_kind(c, s, self.scale, i, j, *self.shift)
        a, b = (i + w1) / k, (j + w2) / k
        return c * a - s * b, s * a + c * b

    def rows(self, R: Rectangle) -> Iterator[Tuple[int, int, int]]:
        """
        逐行给出落在 R 内的格点：产出 (j, i_first, i_last)

        每个半开条件 lo ≤ A·i + B < hi 化成 i 的区间再求交，全程用整数端点；
        斜率与方向都为 0 且输入全是有理数时按 Fraction 精确计算
        """
        with mp.workprec(config.precision):
            ca, sa = self.cos_sin()
            cp, sp = _cos_sin(R.phi)
            ca, sa, cp, sp, k, w1, w2, cx, cy, w, h = _same_kind(
                ca, sa, cp, sp, self.scale, *self.shift, R.center[0], R.center[1],
                R.width, R.height)
            hw, hh = w / 2, h / 2

            # Rot(−α) 作用在矩形两个轴上
            f1 = (ca * cp + sa * sp, -sa * cp + ca * sp)
            f2 = (-ca * sp + sa * cp, sa * sp + ca * cp)
            e1c = cp * cx + sp * cy
            e2c = -sp * cx + cp * cy

            zs = [self.to_lattice(x, y)[1] for x, y in R.vertices()]
            j_lo = _floor(min(zs)) - 1
            j_hi = _ceil(max(zs)) + 1
            for j in range(j_lo, j_hi + 1):
                bounds = []
                for f, offset, half in ((f1, e1c, hw), (f2, e2c, hh)):
                    A = f[0] / k
                    B = (f[0] * w1 + f[1] * (j + w2)) / k - offset
                    bounds.append(_solve_half_open(A, B, -half, half))
                first, last = _intersect_integer(bounds)
                if first is not None and first <= last:
                    yield j, first, last

    def count_in_rect(self, R: Rectangle) -> int:
        return sum(last - first + 1 for _, first, last in self.rows(R))


def _floor(x: Real) -> int:
    return math.floor(x) if isinstance(x, Fraction) else int(mpmath.floor(x))


def _ceil(x: Real) -> int:
    return math.ceil(x) if isinstance(x, Fraction) else int(mpmath.ceil(x))


def _solve_half_open(A: Real, B: Real, lo: Real, hi: Real):
    """
    lo ≤ A·i + B < hi 的解集

    返回 None（无约束）、"empty"，或 (a, a_closed, b, b_closed)
    """
    if A == 0:
        return None if lo <= B < hi else "empty"
    if A > 0:
        return ((lo - B) / A, True, (hi - B) / A, False)
    return ((hi - B) / A, False, (lo - B) / A, True)


def _intersect_integer(bounds) -> Tuple[Optional[int], Optional[int]]:
    first, last = None, None
    for item in bounds:
        if item is None:
            continue
        if item == "empty":
            return None, None
        a, a_closed, b, b_closed = item
        lo_int = _ceil(a) if a_closed else _floor(a) + 1
        hi_int = _floor(b) if b_closed else _ceil(b) - 1
        first = lo_int if first is None else max(first, lo_int)
        last = hi_int if last is None else min(last, hi_int)
    if first is None:
        raise DomainError("矩形在两个方向上都没有约束")
    return first, last
