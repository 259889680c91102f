"""
方向集合模块
方向集合 Ω 的四类模型（有限、缺项、M 阶缺项、类 Cantor 集），
提供 δ-覆盖、代表角、维数以及 τ(d) 指数计算
"""

import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import mpmath
from mpmath import mp, mpf

from config import config
from errors import DomainError
from numtheory import Real, to_fraction, to_mpf

logger = logging.getLogger(__name__)

Angle = Union[Fraction, mpf]

# 类 Cantor 集覆盖区间个数上限（2^22）
MAX_CANTOR_LEVEL = 22


def half_pi() -> mpf:
    return mp.pi / 2


def _key(angle: Angle) -> mpf:
    return to_mpf(angle)


@dataclass(frozen=True)
class AngleInterval:
    """闭区间 [lo, hi]（角度）"""
    lo: Angle
    hi: Angle

    @property
    def length(self) -> Angle:
        return self.hi - self.lo

    def contains(self, angle: Angle) -> bool:
        a = _key(angle)
        return _key(self.lo) <= a <= _key(self.hi)


@dataclass(frozen=True)
class Covering:
    delta: Fraction
    intervals: Tuple[AngleInterval, ...]

    @property
    def count(self) -> int:
        return len(self.intervals)

    def contains(self, angle: Angle) -> bool:
        return any(iv.contains(angle) for iv in self.intervals)


def _sorted_unique(intervals: Iterable[AngleInterval]) -> Tuple[AngleInterval, ...]:
    seen = {}
    for iv in intervals:
        seen.setdefault((iv.lo, iv.hi), iv)
    return tuple(sorted(seen.values(), key=lambda iv: (_key(iv.lo), _key(iv.hi))))


def _check_delta(delta: Real) -> Fraction:
    d = to_fraction(delta)
    if not (0 < d < 1):
        raise DomainError(f"δ 必须位于 (0, 1)，得到 {delta}")
    return d


@dataclass(frozen=True)
class DirectionSet:
    """方向集合基类；include_axes 表示使用时并入坐标轴方向"""
    include_axes: bool = field(default=False, kw_only=True)

    kind = "base"

    def cover(self, delta: Real) -> Covering:
        raise NotImplementedError

    def representatives(self, budget: int) -> List[Angle]:
        raise NotImplementedError

    def dimension(self) -> Real:
        return Fraction(0)

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Finite(DirectionSet):
    angles: Tuple[Angle, ...] = ()

    kind = "finite"

    def __post_init__(self):
        angles = tuple(a if isinstance(a, (Fraction, mpf)) else
                       (Fraction(a) if isinstance(a, int) else mpf(a))
                       for a in self.angles)
        object.__setattr__(self, "angles", angles)

    def cover(self, delta: Real) -> Covering:
        d = _check_delta(delta)
        return Covering(d, _sorted_unique(AngleInterval(a, a) for a in self.angles))

    def representatives(self, budget: int) -> List[Angle]:
        _check_budget(budget)
        return list(self.angles[:budget])

    def to_dict(self) -> dict:
        return {"kind": self.kind, "angles": [str(a) for a in self.angles],
                "include_axes": self.include_axes}


@dataclass(frozen=True)
class Lacunary(DirectionSet):
    """Ω = {b^{-k}}_{k≥1}"""
    base: Fraction = Fraction(2)

    kind = "lacunary"

    def __post_init__(self):
        object.__setattr__(self, "base", Fraction(self.base))
        if self.base <= 1:
            raise DomainError("缺项底数 b 必须 > 1")
        if self.base != 2:
            logger.warning("缺项底数 b=%s ≠ 2，属于实验性用法", self.base)

    def term(self, k: int) -> Fraction:
        return 1 / self.base ** k

    def tail_index(self, delta: Fraction) -> int:
        """最小的 K ≥ 1 使 b^{-K} ≤ δ"""
        k = 1
        while self.term(k) > delta:
            k += 1
        return k

    def cover(self, delta: Real) -> Covering:
        d = _check_delta(delta)
        K = self.tail_index(d)
        intervals = [AngleInterval(Fraction(0), d)]
        intervals += [AngleInterval(self.term(k), self.term(k)) for k in range(1, K)]
        return Covering(d, _sorted_unique(intervals))

    def representatives(self, budget: int) -> List[Angle]:
        _check_budget(budget)
        return [self.term(k) for k in range(1, budget + 1)]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "base": str(self.base), "include_axes": self.include_axes}


@dataclass(frozen=True)
class LacunaryOrderM(DirectionSet):
    """Ω = {b^{-j₁} + … + b^{-j_M} : j_i ≥ 1}"""
    M: int = 1
    base: Fraction = Fraction(2)

    kind = "lacunary_order_m"

    # 代表角枚举的层数上限
    MAX_LEVEL = 256

    def __post_init__(self):
        object.__setattr__(self, "base", Fraction(self.base))
        if self.M < 1:
            raise DomainError("M 必须 ≥ 1")
        if self.base <= 1:
            raise DomainError("底数 b 必须 > 1")
        if self.M / self.base > Fraction(3, 2):
            raise DomainError("M·b⁻¹ 超出 [0, π/2]")
        if self.base != 2:
            logger.warning("M 阶缺项底数 b=%s ≠ 2，属于实验性用法", self.base)

    def _tail_index(self, delta: Fraction) -> int:
        k = 1
        while self.M / self.base ** k > delta:
            k += 1
        return k

    def cover(self, delta: Real) -> Covering:
        # 小指数多重集固定后，其余指数 ≥ K 的部分落在长度 (M−r)·b^{-K} 的区间内
        d = _check_delta(delta)
        K = self._tail_index(d)
        small = range(1, K)
        tail = 1 / self.base ** K
        intervals = []
        for r in range(self.M + 1):
            for combo in combinations_with_replacement(small, r):
                s = sum((1 / self.base ** j for j in combo), Fraction(0))
                intervals.append(AngleInterval(s, s + (self.M - r) * tail))
        return Covering(d, _sorted_unique(intervals))

    def representatives(self, budget: int) -> List[Angle]:
        _check_budget(budget)
        seen = set()
        result: List[Angle] = []
        for level in range(1, self.MAX_LEVEL + 1):
            fresh = set()
            for combo in combinations_with_replacement(range(1, level + 1), self.M):
                if combo[-1] != level:
                    continue
                value = sum((1 / self.base ** j for j in combo), Fraction(0))
                if value not in seen:
                    fresh.add(value)
            for value in sorted(fresh, reverse=True):
                seen.add(value)
                result.append(value)
                if len(result) == budget:
                    return result
        return result

    def to_dict(self) -> dict:
        return {"kind": self.kind, "M": self.M, "base": str(self.base),
                "include_axes": self.include_axes}


@dataclass(frozen=True)
class CantorLike(DirectionSet):
    """
    两分支自相似集，压缩比 r，仿射映射到 [lo, hi]

    lo/hi 缺省为 [π/16, π/2 − π/16]
    """
    ratio: Fraction = Fraction(1, 3)
    lo: Optional[Angle] = None
    hi: Optional[Angle] = None

    kind = "cantor"

    def __post_init__(self):
        ratio = self.ratio if isinstance(self.ratio, (Fraction, mpf)) else Fraction(self.ratio)
        object.__setattr__(self, "ratio", ratio)
        if not (0 < to_mpf(ratio) < mpf(1) / 2):
            raise DomainError("压缩比 r 必须位于 (0, 1/2)")

    def _params(self) -> Tuple[Angle, Angle, Angle]:
        """(lo, hi, r)；三者都是有理数时保持精确，否则统一为 mpf"""
        lo = self.lo if self.lo is not None else mp.pi / 16
        hi = self.hi if self.hi is not None else mp.pi / 2 - mp.pi / 16
        r = self.ratio
        if all(isinstance(v, Fraction) for v in (lo, hi, r)):
            return lo, hi, r
        return to_mpf(lo), to_mpf(hi), to_mpf(r)

    def bounds(self) -> Tuple[Angle, Angle]:
        lo, hi, _ = self._params()
        return lo, hi

    def level_for(self, delta: Fraction) -> int:
        lo, hi, r = self._params()
        bound = delta if isinstance(r, Fraction) else to_mpf(delta)
        level = 0
        while (hi - lo) * r ** level > bound:
            level += 1
        return level

    def left_endpoints(self, level: int) -> List[Angle]:
        lo, hi, r = self._params()
        scale = hi - lo
        steps = [(1 - r) * r ** i for i in range(level)]
        zero = Fraction(0) if isinstance(r, Fraction) else mpf(0)
        points = []
        for digits in product((0, 1), repeat=level):
            offset = sum((s for s, e in zip(steps, digits) if e), zero)
            points.append(lo + scale * offset)
        return sorted(points, key=_key)

    def cover(self, delta: Real) -> Covering:
        d = _check_delta(delta)
        level = self.level_for(d)
        if level > MAX_CANTOR_LEVEL:
            raise DomainError(f"δ={float(d):.3g} 需要 2^{level} 个覆盖区间，超出上限")
        lo, hi, r = self._params()
        width = (hi - lo) * r ** level
        return Covering(d, tuple(AngleInterval(a, a + width) for a in self.left_endpoints(level)))

    def representatives(self, budget: int) -> List[Angle]:
        _check_budget(budget)
        level = min(int(math.log2(budget)), MAX_CANTOR_LEVEL)
        return self.left_endpoints(level)

    def dimension(self) -> Real:
        r = self.ratio
        if isinstance(r, Fraction) and r.numerator == 1:
            j = r.denominator.bit_length() - 1
            if r.denominator == 1 << j:
                return Fraction(1, j)
        return mpmath.log(2) / mpmath.log(1 / to_mpf(r))

    def to_dict(self) -> dict:
        data = {"kind": self.kind, "ratio": str(self.ratio), "include_axes": self.include_axes}
        if self.lo is not None:
            data["lo"] = str(self.lo)
        if self.hi is not None:
            data["hi"] = str(self.hi)
        return data


@dataclass(frozen=True)
class AxesAugmented(DirectionSet):
    """Ω ∪ {0} ∪ (Ω + π/2) ∪ {π/2}，角度取在 [0, π) 内"""
    base: DirectionSet = field(default_factory=Finite)

    kind = "axes"

    def cover(self, delta: Real) -> Covering:
        inner = self.base.cover(delta)
        shift = half_pi()
        intervals = list(inner.intervals)
        intervals += [AngleInterval(to_mpf(iv.lo) + shift, to_mpf(iv.hi) + shift)
                      for iv in inner.intervals]
        intervals += [AngleInterval(Fraction(0), Fraction(0)), AngleInterval(shift, shift)]
        return Covering(inner.delta, _sorted_unique(intervals))

    def representatives(self, budget: int) -> List[Angle]:
        _check_budget(budget)
        shift = half_pi()
        result: List[Angle] = [Fraction(0), shift][:budget]
        if budget > 2:
            for theta in self.base.representatives(max(1, (budget - 2) // 2)):
                result.append(theta)
                if len(result) < budget:
                    result.append(to_mpf(theta) + shift)
        return result[:budget]

    def dimension(self) -> Real:
        return self.base.dimension()

    def to_dict(self) -> dict:
        return {"kind": self.kind, "base": self.base.to_dict()}


def _check_budget(budget: int):
    if budget < 1:
        raise DomainError("budget 必须 ≥ 1")


def cover(omega: DirectionSet, delta: Real) -> Covering:
    return omega.cover(delta)


def representatives(omega: DirectionSet, budget: int) -> List[Angle]:
    return omega.representatives(budget)


def dimension(omega: DirectionSet) -> Real:
    return omega.dimension()


def augment_with_axes(omega: DirectionSet) -> DirectionSet:
    """并入坐标轴方向；有限集仍返回有限集"""
    if isinstance(omega, AxesAugmented):
        return omega
    if isinstance(omega, Finite):
        shift = half_pi()
        angles = [Fraction(0), shift]
        angles += list(omega.angles)
        # θ + π/2 ≥ π 的方向与 θ − π/2 重合，裁掉
        angles += [to_mpf(a) + shift for a in omega.angles if _key(a) < shift]
        unique = {}
        for a in angles:
            unique.setdefault(_key(a), a)
        return Finite(tuple(unique[k] for k in sorted(unique)))
    return AxesAugmented(base=_without_axes_flag(omega))


def _without_axes_flag(omega: DirectionSet) -> DirectionSet:
    from dataclasses import replace
    return replace(omega, include_axes=False) if omega.include_axes else omega


def effective(omega: DirectionSet) -> DirectionSet:
    """按 include_axes 标志返回实际使用的方向集合"""
    return augment_with_axes(omega) if omega.include_axes else omega


@dataclass(frozen=True)
class TauInfo:
    tau: Real
    # τ < 1 时 Minkowski 估计才有意义
    meaningful: bool
    # 差异度指数 τ/(2(τ+1))
    exponent: Real


def tau(d: Real) -> TauInfo:
    """τ(d) = 2/(1−d)² − 2"""
    if isinstance(d, (int, Fraction)):
        d = Fraction(d)
        if not (0 <= d < 1):
            raise DomainError(f"d 必须位于 [0, 1)，得到 {d}")
        t = 2 / (1 - d) ** 2 - 2
        return TauInfo(t, t < 1, t / (2 * (t + 1)))
    with mp.workprec(config.precision):
        d = to_mpf(d)
        if not (0 <= d < 1):
            raise DomainError(f"d 必须位于 [0, 1)，得到 {d}")
        t = 2 / (1 - d) ** 2 - 2
        return TauInfo(t, bool(t < 1), t / (2 * (t + 1)))


MEANINGFUL_DIMENSION_LIMIT = 1 - mpmath.sqrt(mpf(2) / 3)


def from_dict(block: dict) -> DirectionSet:
    """从实验配置的 directions 段构造方向集合"""
    kind = block.get("kind")
    include_axes = bool(block.get("include_axes", False))
    try:
        if kind == "finite":
            angles = tuple(_parse_angle(a) for a in block.get("angles", []))
            return Finite(angles, include_axes=include_axes)
        if kind == "lacunary":
            return Lacunary(Fraction(str(block.get("base", 2))), include_axes=include_axes)
        if kind == "lacunary_order_m":
            return LacunaryOrderM(int(block.get("M", 2)), Fraction(str(block.get("base", 2))),
                                  include_axes=include_axes)
        if kind == "cantor":
            lo = block.get("lo")
            hi = block.get("hi")
            return CantorLike(Fraction(str(block.get("ratio", "1/64"))),
                              _parse_angle(lo) if lo is not None else None,
                              _parse_angle(hi) if hi is not None else None,
                              include_axes=include_axes)
        if kind == "axes":
            return AxesAugmented(base=from_dict(block["base"]))
    except (ValueError, ZeroDivisionError, KeyError) as e:
        raise DomainError(f"方向集合参数无效: {e}") from e
    raise DomainError(f"未知方向集合类型 {kind!r}")


def _parse_angle(text) -> Angle:
    """角度可写成有理数（"1/8"）或十进制小数（按 mpf 解析）"""
    text = str(text)
    try:
        return Fraction(text) if "/" in text or text.lstrip("-").isdigit() else mpf(text)
    except (ValueError, ZeroDivisionError):
        return mpf(text)
