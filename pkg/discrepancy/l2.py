"""
平移平均的 L² 差异度
"""

import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

import numpy as np
from mpmath import mp

from config import config
from errors import DomainError
from numtheory import Real, fourier_weight_sum, to_fraction
from geometry import LatticeSpec, Rectangle
from pointsets import shifted_rotated_lattice
from discrepancy.decomposition import Side
from discrepancy.rectangles import RectangleFamilySpec

logger = logging.getLogger(__name__)


def l2_shift_discrepancy(R: Rectangle, spec: LatticeSpec, Q: int = 64) -> float:
    """
    ∫_{[0,1)²} D_ω(R)² dω 的 Q×Q 中点求积

    spec 的平移被忽略，ω 取 ((a+½)/Q, (b+½)/Q)；D_ω = #(格点 ∩ R) − scale²·|R|
    """
    if Q < 2:
        raise DomainError("Q 必须 ≥ 2")
    with mp.workprec(config.precision):
        density_area = float(spec.scale) ** 2 * float(R.area)
        total = 0.0
        for a in range(Q):
            for b in range(Q):
                shifted = LatticeSpec(spec.slope, spec.scale,
                                      (Fraction(2 * a + 1, 2 * Q), Fraction(2 * b + 1, 2 * Q)))
                d = shifted.count_in_rect(R) - density_area
                total += d * d
    return total / (Q * Q)


@dataclass(frozen=True)
class FourierIdentity:
    lhs: float
    rhs: float
    tail_bound: float

    @property
    def holds(self) -> bool:
        return 0 <= self.lhs - self.rhs <= self.tail_bound + 1e-9


def _integrate_square(left: float, right: float, f_left: float, f_right: float) -> float:
    """线性段上 ∫ f² 的 Simpson 公式（对二次函数精确）"""
    return (right - left) * (f_left ** 2 + f_left * f_right + f_right ** 2) / 3.0


def l2_fourier_side_identity(side: Side, I: range, nu_max: int, Q: int = 1024) -> FourierIdentity:
    """
    ∫₀¹ (Σ_{n∈I} ψ(a − ω + n·t))² dω 与 (1/2π²)·Σ_{ν≤ν_max} ν⁻²|Σ_n e^{−2πiνn·t}|²

    a = a2 − a1·t。左边在 ω 上分段线性，网格为 Q 等分加上所有跳点；
    右边差一个 ≤ |I|²/(2π²ν_max) 的截断尾项
    """
    if len(I) == 0:
        raise DomainError("区间 I 不能为空")
    if Q < 1:
        raise DomainError("Q 必须 ≥ 1")
    t = to_fraction(side.slope)
    a = to_fraction(side.a2) - to_fraction(side.a1) * t
    # x_n = {a + n·t}，ψ(x_n − ω) = x_n − ω + [x_n < ω] − 1/2
    xs = []
    for n in I:
        y = a + n * t
        xs.append(float(y - math.floor(y)))
    xs = np.sort(np.array(xs))
    length = len(I)
    base = float(np.sum(xs)) - length / 2.0

    mesh = np.union1d(np.linspace(0.0, 1.0, Q + 1), xs)
    total = 0.0
    for left, right in zip(mesh[:-1], mesh[1:]):
        if right <= left:
            continue
        # 段内 #{x_n < ω} 恒定
        below = int(np.searchsorted(xs, left, side="right"))
        f_left = base - length * left + below
        f_right = base - length * right + below
        total += _integrate_square(left, right, f_left, f_right)

    weights = fourier_weight_sum(I, t, nu_max)
    scale = 1.0 / (2.0 * math.pi ** 2)
    result = FourierIdentity(total, scale * weights.value, scale * weights.tail_bound)
    logger.debug("L² 边恒等式 |I|=%d: lhs=%.6g rhs=%.6g tail=%.3g",
                 length, result.lhs, result.rhs, result.tail_bound)
    return result


def halton(index: int, base: int) -> Fraction:
    """基 base 的根式反演，index = 0 给出 0"""
    result, f = Fraction(0), Fraction(1, base)
    while index > 0:
        index, digit = divmod(index, base)
        result += digit * f
        f /= base
    return result


def shift_scan(slope: Real, N: int, family: RectangleFamilySpec,
               K: int) -> List[Tuple[Tuple[Fraction, Fraction], float]]:
    """前 K 个 Halton(2, 3) 平移（精确有理数）及其族平均平方差异度"""
    if K < 1:
        raise DomainError("K 必须 ≥ 1")
    result = []
    for k in range(K):
        omega = (halton(k, 2), halton(k, 3))
        P = shifted_rotated_lattice(N, slope, omega)
        result.append((omega, family.mean_square(P)))
    return result


def best_shift(slope: Real, N: int, family: RectangleFamilySpec,
               K: int = 16) -> Tuple[Tuple[Fraction, Fraction], float]:
    """Halton 候选中族平均平方差异度最小的平移，平局取下标最小者"""
    scan = shift_scan(slope, N, family, K)
    best = min(range(len(scan)), key=lambda k: (scan[k][1], k))
    shift, value = scan[best]
    logger.info("N=%d 最优平移 (%s, %s)，均方差异度 %.6g", N, shift[0], shift[1], value)
    return scan[best]
