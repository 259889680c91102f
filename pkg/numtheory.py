"""
数论基础模块
最近整数距离、锯齿函数、连分数、ψ 型边界、倒数和以及指数和
"""

import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import mpmath
from mpmath import mp, mpf

from config import config
from errors import PrecisionExhaustedError, RationalDirectionError, DomainError

logger = logging.getLogger(__name__)

Real = Union[int, float, Fraction, mpf]


def to_fraction(x: Real) -> Fraction:
    """把 int/float/Fraction/mpf 精确转换为 Fraction（mpf 与 float 都是二进制有理数）"""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, mpf):
        if not mpmath.isfinite(x):
            raise DomainError(f"非有限实数 {x}")
        man, exp = x.man_exp
        if exp >= 0:
            return Fraction(int(man) << int(exp))
        return Fraction(int(man), 1 << int(-exp))
    raise TypeError(f"不支持的实数类型: {type(x).__name__}")


def to_mpf(x: Real) -> mpf:
    """在当前工作精度下转换为 mpf"""
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


def lg(n: Real) -> mpf:
    """log n 约定为 max(1, log₂ n)"""
    if n <= 2:
        return mpf(1)
    return max(mpf(1), mpmath.log(to_mpf(n), 2))


def frac_exact(x: Fraction) -> Fraction:
    return x - math.floor(x)


def nearest_int_dist(x: Real) -> Real:
    """‖x‖：x 到最近整数的距离，返回类型跟随输入"""
    if isinstance(x, (int, Fraction)):
        f = frac_exact(Fraction(x))
        return min(f, 1 - f)
    if isinstance(x, float):
        f = frac_exact(Fraction(x))
        return float(min(f, 1 - f))
    x = mpf(x)
    f = x - mpmath.floor(x)
    return min(f, 1 - f)


def sawtooth(x: Real) -> Real:
    """ψ(x) = {x} − 1/2，周期为 1"""
    if isinstance(x, (int, Fraction)):
        return frac_exact(Fraction(x)) - Fraction(1, 2)
    if isinstance(x, float):
        return float(frac_exact(Fraction(x)) - Fraction(1, 2))
    x = mpf(x)
    return x - mpmath.floor(x) - mpf(0.5)


@dataclass(frozen=True)
class ContinuedFraction:
    """连分数展开结果"""
    quotients: Tuple[int, ...]
    # 有理输入且在 depth 内完整终止
    terminated: bool = False

    def __len__(self) -> int:
        return len(self.quotients)


def _bracket(x: Real) -> Tuple[Fraction, Fraction]:
    """浮点输入的可信区间 [x − ulp, x + ulp]"""
    centre = to_fraction(x)
    if isinstance(x, float):
        err = Fraction(math.ulp(x))
    else:
        man, exp = mpf(x).man_exp
        bits = int(man).bit_length() if man else 1
        err = Fraction(2) ** (int(exp) + bits - mp.prec)
    return centre - err, centre + err


def _expand_certified(x: Real, depth: int) -> ContinuedFraction:
    if isinstance(x, (int, Fraction)):
        value = Fraction(x)
        quotients: List[int] = []
        while len(quotients) < depth:
            a = math.floor(value)
            quotients.append(a)
            rest = value - a
            if rest == 0:
                return ContinuedFraction(tuple(quotients), terminated=True)
            value = 1 / rest
        return ContinuedFraction(tuple(quotients))

    lo, hi = _bracket(x)
    quotients = []
    while len(quotients) < depth:
        a_lo, a_hi = math.floor(lo), math.floor(hi)
        if a_lo != a_hi:
            raise PrecisionExhaustedError(certified=len(quotients),
                                          detail=f"已认证部分商 {quotients}")
        quotients.append(a_lo)
        r_lo, r_hi = lo - a_lo, hi - a_lo
        if r_lo <= 0:
            # 区间触及整数，下一个商无法认证
            if len(quotients) < depth:
                raise PrecisionExhaustedError(certified=len(quotients),
                                              detail=f"已认证部分商 {quotients}")
            break
        lo, hi = 1 / r_hi, 1 / r_lo
    return ContinuedFraction(tuple(quotients))


def continued_fraction(x: Union[Real, Callable[[], Real]], depth: int,
                       max_prec: Optional[int] = None) -> ContinuedFraction:
    """
    连分数展开

    有理输入用欧几里得算法；浮点/mpf 输入同时展开 x 的误差区间两端，
    只有两端商一致时才算已认证。
    x 也可以是无参函数（按当前 mp 精度求值）：认证不足时精度加倍重算，
    直到 max_prec（默认 config.interval_bits_cap）。

    Args:
        x: 实数、精确有理数或求值函数
        depth: 最多返回的部分商个数
        max_prec: 求值函数可用的最高精度（比特）

    Returns:
        ContinuedFraction

    Raises:
        PrecisionExhaustedError: 精度不足以认证 depth 个部分商
    """
    if depth < 1:
        raise DomainError("depth 必须 ≥ 1")
    if not callable(x):
        return _expand_certified(x, depth)

    cap = max_prec if max_prec is not None else config.interval_bits_cap
    prec = min(max(mp.prec, config.precision), cap)
    while True:
        with mp.workprec(prec):
            value = x()
            try:
                return _expand_certified(value, depth)
            except PrecisionExhaustedError as e:
                if prec >= cap:
                    raise
                logger.info("连分数在 %d 比特下只认证了 %s 个部分商，精度加倍", prec, e.certified)
        prec = min(2 * prec, cap)


@dataclass(frozen=True)
class PsiFunction:
    """
    非减正函数 ψ

    kind 取 constant / log_power / power / stepwise；
    stepwise 在 [breakpoints[i], breakpoints[i+1]) 上取 values[i]。
    """
    kind: str
    C: Fraction = Fraction(1)
    exponent: Fraction = Fraction(0)
    breakpoints: Tuple[int, ...] = field(default=())
    values: Tuple[Fraction, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in ("constant", "log_power", "power", "stepwise"):
            raise DomainError(f"未知 ψ 类型 {self.kind}")
        if self.kind == "stepwise":
            if not self.breakpoints or len(self.breakpoints) != len(self.values):
                raise DomainError("stepwise ψ 需要等长的断点与取值")
            if any(b2 <= b1 for b1, b2 in zip(self.breakpoints, self.breakpoints[1:])):
                raise DomainError("断点必须严格递增")
            if any(v2 < v1 for v1, v2 in zip(self.values, self.values[1:])):
                raise DomainError("stepwise ψ 必须非减")
            if self.values[0] <= 0:
                raise DomainError("ψ 必须为正")
        else:
            if self.C <= 0 or self.exponent < 0:
                raise DomainError("ψ 的常数必须为正、指数非负")

    @classmethod
    def constant(cls, c: Real = 1) -> "PsiFunction":
        return cls("constant", C=Fraction(c))

    @classmethod
    def log_power(cls, C: Real, power: Real) -> "PsiFunction":
        return cls("log_power", C=Fraction(C), exponent=Fraction(power))

    @classmethod
    def power(cls, C: Real, exponent: Real) -> "PsiFunction":
        return cls("power", C=Fraction(C), exponent=Fraction(exponent))

    @classmethod
    def stepwise(cls, breakpoints: Sequence[int], values: Sequence[Real]) -> "PsiFunction":
        return cls("stepwise", breakpoints=tuple(int(b) for b in breakpoints),
                   values=tuple(Fraction(v) for v in values))

    @property
    def is_power_type(self) -> bool:
        return self.kind == "power" and self.exponent > 0

    def __call__(self, q: Real) -> mpf:
        if self.kind == "constant":
            return to_mpf(self.C)
        if self.kind == "log_power":
            return to_mpf(self.C) * lg(q) ** to_mpf(self.exponent)
        if self.kind == "power":
            return to_mpf(self.C) * to_mpf(q) ** to_mpf(self.exponent)
        index = 0
        for i, b in enumerate(self.breakpoints):
            if q >= b:
                index = i
            else:
                break
        return to_mpf(self.values[index])

    def describe(self) -> str:
        if self.kind == "constant":
            return f"{self.C}"
        if self.kind == "log_power":
            return f"{self.C}·log^{self.exponent} q"
        if self.kind == "power":
            return f"{self.C}·q^{self.exponent}"
        return f"stepwise({len(self.breakpoints)} 段)"


def type_psi_margin(theta: Real, Q: int, psi: PsiFunction) -> Tuple[mpf, int]:
    """
    min_{1≤q≤Q} q·‖qθ‖·ψ(q) 及取到最小值的 q

    margin > 1 表示 θ 在 Q 以内是 <ψ 型；有理 θ 命中分母时 margin 为 0
    """
    if Q < 1:
        raise DomainError("Q 必须 ≥ 1")
    with mp.workprec(config.precision):
        exact = isinstance(theta, (int, Fraction))
        value = Fraction(theta) if exact else to_mpf(theta)
        best, witness = None, 1
        for q in range(1, Q + 1):
            dist = nearest_int_dist(q * value)
            margin = q * to_mpf(dist) * psi(q)
            if best is None or margin < best:
                best, witness = margin, q
        return best, witness


def weighted_reciprocal_sum(theta: Real, m: int) -> mpf:
    """Σ_{h=1}^m 1/(h‖hθ‖)"""
    if m < 1:
        raise DomainError("m 必须 ≥ 1")
    with mp.workprec(max(config.precision, 128)):
        exact = isinstance(theta, (int, Fraction))
        value = Fraction(theta) if exact else to_mpf(theta)
        total = mpf(0)
        for h in range(1, m + 1):
            dist = nearest_int_dist(h * value)
            if dist == 0:
                raise RationalDirectionError(h)
            total += 1 / (h * to_mpf(dist))
        return total


def reciprocal_sum_bound(psi: PsiFunction, m: int, variant: str = "sharp") -> mpf:
    """
    倒数和的上界（不含被省略的绝对常数，常数见 config.reciprocal_sum_constant）

    sharp:    log²m + ψ(m) + Σ ψ(h)/h
    by-parts: ψ(2m)·log m + Σ ψ(2h)·log h / h
    """
    if m < 2:
        raise DomainError("m 必须 ≥ 2")
    with mp.workprec(config.precision):
        if variant == "sharp":
            total = lg(m) ** 2 + psi(m)
            total += mpmath.fsum(psi(h) / h for h in range(1, m + 1))
            return total
        if variant == "by-parts":
            total = psi(2 * m) * lg(m)
            total += mpmath.fsum(psi(2 * h) * lg(h) / h for h in range(1, m + 1))
            return total
    raise DomainError(f"未知 variant {variant}")


def fit_reciprocal_constant(thetas: Sequence[Real], m: int, psi: PsiFunction,
                            variant: str = "sharp") -> Tuple[mpf, int]:
    """
    拟合全局常数 C = max weighted_reciprocal_sum / reciprocal_sum_bound

    只统计在 m 以内满足 <ψ 型的 θ；返回 (C, 参与拟合的 θ 个数)
    """
    bound = reciprocal_sum_bound(psi, m, variant)
    best, used = mpf(0), 0
    for theta in thetas:
        margin, _ = type_psi_margin(theta, m, psi)
        if margin <= 1:
            continue
        used += 1
        best = max(best, weighted_reciprocal_sum(theta, m) / bound)
    logger.info("倒数和常数拟合: C=%s（%d 个 θ）", mpmath.nstr(best, 8), used)
    return best, used


def _phase(numerator: int, denominator: int, k: int) -> Fraction:
    """{k·a/b} 的精确值"""
    return Fraction((k * numerator) % denominator, denominator)


def exp_sum_magnitude(I: range, slope: Real, nu: int) -> mpf:
    """
    |Σ_{n∈I} e^{−2πiνn·slope}| 的几何级数闭式

    ν·slope 为整数时走 |I| 分支
    """
    length = len(I)
    if length == 0:
        raise DomainError("区间 I 不能为空")
    if nu < 1:
        raise DomainError("ν 必须 ≥ 1")
    s = to_fraction(slope)
    with mp.workprec(config.precision):
        x = _phase(s.numerator, s.denominator, nu)
        if x == 0:
            return mpf(length)
        xl = _phase(s.numerator, s.denominator, nu * length)
        value = abs(mpmath.sinpi(to_mpf(xl)) / mpmath.sinpi(to_mpf(x)))
        return min(value, mpf(length))


@dataclass(frozen=True)
class FourierWeightSum:
    value: float
    # ν > ν_max 部分的上界 |I|²/ν_max
    tail_bound: float


def exp_sum_magnitudes(length: int, slope: Real, nu_max: int) -> np.ndarray:
    """ν = 1..ν_max 的指数和模长（float64 向量化，相位先精确约化）"""
    s = to_fraction(slope)
    a, b = s.numerator, s.denominator
    nus = range(1, nu_max + 1)
    x = np.array([float(_phase(a, b, nu)) for nu in nus])
    xl = np.array([float(_phase(a, b, nu * length)) for nu in nus])
    x = np.minimum(x, 1.0 - x)
    xl = np.minimum(xl, 1.0 - xl)
    degenerate = x == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.abs(np.sin(np.pi * xl) / np.sin(np.pi * x))
    ratio = np.where(degenerate, float(length), np.minimum(ratio, float(length)))
    return ratio


def fourier_weight_sum(I: range, slope: Real, nu_max: int) -> FourierWeightSum:
    """Σ_{ν=1}^{ν_max} ν⁻²·|S_ν|² 及尾项上界"""
    if nu_max < 1:
        raise DomainError("ν_max 必须 ≥ 1")
    length = len(I)
    if length == 0:
        raise DomainError("区间 I 不能为空")
    mags = exp_sum_magnitudes(length, slope, nu_max)
    nus = np.arange(1, nu_max + 1, dtype=float)
    value = float(np.sum(mags ** 2 / nus ** 2))
    return FourierWeightSum(value=value, tail_bound=length ** 2 / nu_max)
