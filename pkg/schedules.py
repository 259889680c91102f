"""
参数表模块
嵌套区间构造的阶段参数 R(n)、c(n)、|I_n|、δ_n、N_n，四个参数族各一个类
"""

import math
import logging
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from typing import ClassVar, Optional

import mpmath
from mpmath import mp, mpf

from config import config
from errors import ConfigError, DomainError
from numtheory import Real, lg, to_fraction, to_mpf
import direction_sets as ds

logger = logging.getLogger(__name__)


def dyadic_floor(x: Real, bits: int = 64) -> Fraction:
    """
    向下取整到 bits 位尾数的二进制有理数

    Args:
        x: 正实数
        bits: 尾数位数

    Returns:
        不超过 x 的最大 m/2^k，其中 m < 2^bits
    """
    if isinstance(x, Fraction):
        if x <= 0:
            raise DomainError(f"dyadic_floor 需要正数，得到 {x}")
        e = x.numerator.bit_length() - x.denominator.bit_length()
        if Fraction(2) ** e > x:
            e -= 1
        shift = bits - 1 - e
        scaled = x * (Fraction(2) ** shift)
        return Fraction(math.floor(scaled)) / (Fraction(2) ** shift)
    with mp.workprec(max(config.precision, bits + 32)):
        x = to_mpf(x)
        if x <= 0:
            raise DomainError(f"dyadic_floor 需要正数，得到 {x}")
        e = int(mpmath.floor(mpmath.log(x, 2)))
        # log 的舍入可能让 e 偏一位
        if mpmath.ldexp(mpf(1), e) > x:
            e -= 1
        elif mpmath.ldexp(mpf(1), e + 1) <= x:
            e += 1
        shift = bits - 1 - e
        m = int(mpmath.floor(mpmath.ldexp(x, shift)))
    return Fraction(m) / (Fraction(2) ** shift)


@dataclass(frozen=True)
class Schedule:
    """阶段参数表基类；c、I_len、delta 都返回精确有理数"""
    c0: Fraction = field(default_factory=lambda: config.c0)
    eps0: Fraction = field(default_factory=lambda: config.eps0)
    C_deriv: Fraction = field(default_factory=lambda: config.c_deriv)

    kind: ClassVar[str] = "base"
    n_start: ClassVar[int] = 0

    def __post_init__(self):
        for name in ("c0", "eps0", "C_deriv"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if not (0 < self.c0 < 1 and 0 < self.eps0 < 1):
            raise DomainError("c0 与 eps0 必须位于 (0, 1)")
        if self.C_deriv < 1:
            raise DomainError("C_deriv 不能小于 1")

    # 子类实现实数版本
    def R(self, n: int) -> mpf:
        raise NotImplementedError

    def _c(self, n: int) -> mpf:
        raise NotImplementedError

    def _I_len(self, n: int) -> Real:
        raise NotImplementedError

    def _delta(self, n: int) -> Real:
        raise NotImplementedError

    def N_bound(self, n: int) -> int:
        raise NotImplementedError

    def _check_stage(self, n: int):
        if n < self.n_start - 1:
            raise DomainError(f"{self.kind} 参数表从 n={self.n_start} 开始，得到 n={n}")

    def q_lo(self, n: int) -> int:
        """第 n 阶段分母下界 ⌈R(n)⌉"""
        self._check_stage(n)
        with mp.workprec(config.precision):
            return int(mpmath.ceil(self.R(n)))

    def q_hi(self, n: int) -> int:
        """第 n 阶段分母上界 ⌈R(n+1)⌉ − 1"""
        return self.q_lo(n + 1) - 1

    def c(self, n: int) -> Fraction:
        self._check_stage(n)
        with mp.workprec(config.precision):
            value = self._c(n)
            return value if isinstance(value, Fraction) else dyadic_floor(value)

    def I_len(self, n: int) -> Fraction:
        self._check_stage(n)
        with mp.workprec(config.precision):
            value = self._I_len(n)
            return value if isinstance(value, Fraction) else dyadic_floor(value)

    def delta(self, n: int) -> Fraction:
        self._check_stage(n)
        with mp.workprec(config.precision):
            value = self._delta(n)
            if isinstance(value, Fraction):
                return value
            return dyadic_floor(value)

    def to_dict(self) -> dict:
        data = {"kind": self.kind}
        for key, value in asdict(self).items():
            # mpf 按二进有理数精确写出
            data[key] = str(to_fraction(value)) if isinstance(value, mpf) else str(value)
        return data

    def describe(self) -> str:
        return f"{self.kind}(c0={self.c0}, eps0={self.eps0})"


@dataclass(frozen=True)
class FiniteSetSchedule(Schedule):
    """有限方向集：R(n) = R₀ⁿ，c(n) = c₀，δ = 0"""
    size: int = 1
    R0: int = 4

    kind: ClassVar[str] = "finite"
    n_start: ClassVar[int] = 0

    def __post_init__(self):
        super().__post_init__()
        if self.size < 1 or self.R0 < 2:
            raise DomainError("FiniteSet 参数表需要 size ≥ 1、R₀ ≥ 2")

    @classmethod
    def default_R0(cls, size: int) -> int:
        return max(4, math.ceil(2 * math.sqrt(size + 1)))

    def R(self, n: int) -> mpf:
        return mpf(self.R0) ** n

    def _c(self, n: int) -> Fraction:
        return self.c0

    def _I_len(self, n: int) -> Fraction:
        return self.eps0 / Fraction(self.R0) ** (2 * (n + 2))

    def _delta(self, n: int) -> Fraction:
        return Fraction(0)

    def N_bound(self, n: int) -> int:
        return self.size


@dataclass(frozen=True)
class LacunarySchedule(Schedule):
    """缺项序列：R(n) = n^{n/2} log^{n/2} n"""
    eps_delta: Fraction = field(default_factory=lambda: config.eps_delta)

    kind: ClassVar[str] = "lacunary"
    n_start: ClassVar[int] = 1

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "eps_delta", to_fraction(self.eps_delta))
        if not (0 < self.eps_delta <= 1):
            raise DomainError("eps_delta 必须位于 (0, 1]")

    def R(self, n: int) -> mpf:
        if n <= 0:
            return mpf(1)
        half = mpf(n) / 2
        return mpf(n) ** half * lg(n) ** half

    def _c(self, n: int) -> mpf:
        return to_mpf(self.c0) / ((n + 1) ** 2 * lg(n + 1) ** 2)

    def _I_len(self, n: int) -> mpf:
        k = n + 2
        return to_mpf(self.eps0) * mpf(k) ** (-k) * lg(k) ** (-k)

    def _delta(self, n: int) -> mpf:
        k = n + 1
        return to_mpf(self.eps_delta) * mpf(k) ** (-2 * k)

    def N_bound(self, n: int) -> int:
        with mp.workprec(config.precision):
            return int(mpmath.ceil(2 * (n + 1) * lg(n + 1)))


@dataclass(frozen=True)
class OrderMSchedule(Schedule):
    """M 阶缺项集：R(n) = (Mn)^{Mn/2} log^{Mn/2} n"""
    M: int = 2
    eps_delta: Fraction = field(default_factory=lambda: config.eps_delta)

    kind: ClassVar[str] = "lacunary_order_m"
    n_start: ClassVar[int] = 1

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "eps_delta", to_fraction(self.eps_delta))
        if self.M < 1:
            raise DomainError("M 必须 ≥ 1")
        if not (0 < self.eps_delta <= 1):
            raise DomainError("eps_delta 必须位于 (0, 1]")

    def R(self, n: int) -> mpf:
        if n <= 0:
            return mpf(1)
        half = mpf(self.M * n) / 2
        return mpf(self.M * n) ** half * lg(n) ** half

    def _c(self, n: int) -> mpf:
        M = self.M
        return to_mpf(self.c0) / (mpf(M * (n + 1)) ** (2 * M) * lg(n + 1) ** (2 * M))

    def _I_len(self, n: int) -> mpf:
        M, k = self.M, n + 2
        return to_mpf(self.eps0) * mpf(M * k) ** (-M * k) * lg(k) ** (-M * k)

    def _delta(self, n: int) -> mpf:
        M, k = self.M, n + 1
        return to_mpf(self.eps_delta) * M * mpf(k) ** (-2 * M * k)

    def N_bound(self, n: int) -> int:
        M = self.M
        with mp.workprec(config.precision):
            return int(mpmath.ceil(mpf(2 * M) ** M * mpf(n + 1) ** M * lg(n + 1) ** M))

    def describe(self) -> str:
        return f"{self.kind}(M={self.M}, c0={self.c0}, eps0={self.eps0})"


@dataclass(frozen=True)
class MinkowskiSchedule(Schedule):
    """
    上 Minkowski 维数 d < 1：a = 1/(1−t)，R(n) = 2^{aⁿ}

    默认 t = (d+1)/2，s = (d+t)/2，ε₁ = ε₂ = ε₀
    """
    d: Real = Fraction(0)
    t: Optional[Real] = None
    s: Optional[Real] = None
    C_s: Fraction = Fraction(4)

    kind: ClassVar[str] = "minkowski"
    n_start: ClassVar[int] = 0

    def __post_init__(self):
        super().__post_init__()
        d = self.d
        if not (0 <= d < 1):
            raise DomainError(f"维数 d 必须位于 [0, 1)，得到 {d}")
        t = self.t if self.t is not None else (d + 1) / 2
        s = self.s if self.s is not None else (d + t) / 2
        if not (d < s < t < 1):
            raise DomainError(f"需要 d < s < t < 1，得到 d={d}, s={s}, t={t}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "C_s", to_fraction(self.C_s))

    @property
    def a(self) -> Real:
        return 1 / (1 - self.t)

    def _a_pow(self, n: int) -> mpf:
        return to_mpf(self.a) ** n

    def R(self, n: int) -> mpf:
        return mpf(2) ** self._a_pow(n)

    def _c(self, n: int) -> mpf:
        a = to_mpf(self.a)
        return to_mpf(self.c0) * mpf(2) ** (-2 * self._a_pow(n) * (a ** 2 - 1))

    def _I_len(self, n: int) -> mpf:
        return to_mpf(self.eps0) * mpf(2) ** (-2 * self._a_pow(n + 2))

    def _delta(self, n: int) -> mpf:
        return to_mpf(self.eps0) * mpf(2) ** (-2 * self._a_pow(n + 2))

    def N_bound(self, n: int) -> int:
        with mp.workprec(config.precision):
            delta = to_mpf(self.delta(n))
            return int(mpmath.ceil(to_mpf(self.C_s) * delta ** (-to_mpf(self.s))))

    def describe(self) -> str:
        return f"{self.kind}(d={self.d}, t={self.t}, s={self.s}, c0={self.c0})"


SCHEDULE_CLASSES = {
    cls.kind: cls
    for cls in (FiniteSetSchedule, LacunarySchedule, OrderMSchedule, MinkowskiSchedule)
}

_FRACTION_FIELDS = ("c0", "eps0", "C_deriv", "eps_delta", "C_s")


def _parse_number(text: str) -> Real:
    text = str(text)
    try:
        return Fraction(text)
    except ValueError:
        return mpf(text)


def from_dict(data: dict) -> Schedule:
    """从证书或实验配置还原参数表"""
    kind = data.get("kind")
    cls = SCHEDULE_CLASSES.get(kind)
    if cls is None:
        raise ConfigError(f"未知参数表类型 {kind!r}")
    kwargs = {}
    try:
        for key, value in data.items():
            if key == "kind" or value is None:
                continue
            if key in ("size", "R0", "M"):
                kwargs[key] = int(value)
            elif key in _FRACTION_FIELDS or key in ("d", "t", "s"):
                kwargs[key] = _parse_number(value)
            else:
                raise ConfigError(f"参数表 {kind} 没有字段 {key!r}")
        return cls(**kwargs)
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise ConfigError(f"参数表字段无效: {e}") from e


def schedule_for(omega: ds.DirectionSet, **overrides) -> Schedule:
    """
    按方向集合类型选择参数表族

    Finite → FiniteSet，Lacunary → Lacunary，LacunaryOrderM → OrderM（M=1 时退化为 Lacunary），
    CantorLike → Minkowski(d)。overrides 覆盖常数（c0、eps0、C_deriv 等）。
    """
    effective = ds.effective(omega)
    base = effective.base if isinstance(effective, ds.AxesAugmented) else effective
    kwargs = {k: v for k, v in overrides.items() if v is not None}

    if isinstance(base, ds.Finite):
        size = max(1, len(effective.angles) if isinstance(effective, ds.Finite) else len(base.angles))
        kwargs.setdefault("R0", FiniteSetSchedule.default_R0(size))
        sched = FiniteSetSchedule(size=size, **kwargs)
    elif isinstance(base, ds.LacunaryOrderM) and base.M > 1:
        sched = OrderMSchedule(M=base.M, **kwargs)
    elif isinstance(base, (ds.Lacunary, ds.LacunaryOrderM)):
        sched = LacunarySchedule(**kwargs)
    elif isinstance(base, ds.CantorLike):
        sched = MinkowskiSchedule(d=base.dimension(), **kwargs)
    else:
        raise DomainError(f"方向集合 {type(base).__name__} 没有对应的参数表")
    logger.info("参数表: %s", sched.describe())
    return sched
