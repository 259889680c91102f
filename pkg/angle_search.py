"""
角度搜索模块
在斜率空间 t = tan α 中构造嵌套区间链，使极限角对方向集合 Ω 中每个方向
满足分阶段的丢番图不等式，并输出可独立验证的证书
"""

import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, NamedTuple, Optional, Tuple

import numpy as np
import mpmath
from mpmath import mp, mpf

from config import config
from errors import DomainError, PrecisionExhaustedError, ScheduleInfeasibleError
from numtheory import PsiFunction, Real, to_fraction, to_mpf
import direction_sets as ds
from schedules import (FiniteSetSchedule, LacunarySchedule, MinkowskiSchedule,
                       OrderMSchedule, Schedule, schedule_for)

logger = logging.getLogger(__name__)

# 角度窗口的粗覆盖分辨率
COARSE_DELTA = Fraction(1, 64)


class InequalityCheck(NamedTuple):
    ok1: bool
    ok2: bool
    slack: mpf


@dataclass(frozen=True)
class SlopeInterval:
    """斜率空间闭区间 [lo, hi]，端点为精确有理数"""
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"斜率区间需要 lo < hi，得到 [{self.lo}, {self.hi}]")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, t: Fraction) -> bool:
        return self.lo <= t <= self.hi

    def contains_interval(self, other: "SlopeInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def to_pair(self) -> List[str]:
        return [str(self.lo), str(self.hi)]

    @classmethod
    def from_pair(cls, pair) -> "SlopeInterval":
        return cls(Fraction(pair[0]), Fraction(pair[1]))


@dataclass(frozen=True)
class Exclusion:
    """覆盖区间 index 上由分数 p/q 产生的被排除斜率区间"""
    index: int
    p: int
    q: int
    lo: Fraction
    hi: Fraction


@dataclass
class StageRecord:
    n: int
    interval: SlopeInterval
    exclusions: List[Exclusion] = field(default_factory=list)
    check: Optional[InequalityCheck] = None
    covering_count: int = 0


@dataclass(frozen=True)
class AngleWindow:
    """α 的限制范围、选中的起始角 α* 以及该处 tan(α−θ) 的 Lipschitz 常数"""
    lo: mpf
    hi: mpf
    alpha: mpf
    lipschitz: Fraction


@dataclass
class NestedIntervalCertificate:
    schedule: Schedule
    omega: ds.DirectionSet
    window: AngleWindow
    c_deriv: Fraction
    chain: List[StageRecord] = field(default_factory=list)
    global_constant: Optional[mpf] = None
    psi: Optional[PsiFunction] = None
    cap: str = ""

    @property
    def stages(self) -> List[StageRecord]:
        """已细化的阶段（不含初始区间）"""
        return self.chain[1:]

    @property
    def slope(self) -> Fraction:
        return self.chain[-1].interval.midpoint

    @property
    def verified_q_range(self) -> Optional[Tuple[int, int]]:
        if len(self.chain) < 2:
            return None
        first, last = self.chain[1].n, self.chain[-1].n
        return self.schedule.q_lo(first), self.schedule.q_hi(last)

    def is_nested(self) -> bool:
        return all(a.interval.contains_interval(b.interval)
                   for a, b in zip(self.chain, self.chain[1:]))


# ---------------------------------------------------------------- 斜率空间变换

def _direction_vector(theta: ds.Angle, shift: mpf) -> Tuple[Fraction, Fraction]:
    """方向 θ+shift 的有理方向向量 (c, d) ≈ (cos, sin)"""
    if shift == 0 and isinstance(theta, Fraction) and theta == 0:
        return Fraction(1), Fraction(0)
    angle = to_mpf(theta) + shift
    return to_fraction(mpmath.cos(angle)), to_fraction(mpmath.sin(angle))


def slope_transform(t: Fraction, c: Fraction, d: Fraction) -> Fraction:
    """tan(α−θ) = (ct − d)/(c + dt)"""
    den = c + d * t
    if den <= 0:
        raise ScheduleInfeasibleError(0, f"斜率 {t} 处 tan(α−θ) 出现极点")
    return (c * t - d) / den


def inverse_transform(y: Fraction, c: Fraction, d: Fraction) -> Fraction:
    """slope_transform 的逆：tan(θ + arctan y) = (cy + d)/(c − dy)"""
    den = c - d * y
    if den <= 0:
        raise ScheduleInfeasibleError(0, f"y={y} 超出 θ 的单值分支")
    return (c * y + d) / den


def tan_difference(t: Real, theta: ds.Angle) -> mpf:
    """高精度 tan(α−θ)，t = tan α"""
    angle = to_mpf(theta)
    c, d = mpmath.cos(angle), mpmath.sin(angle)
    t = to_mpf(t)
    return (c * t - d) / (c + d * t)


# ---------------------------------------------------------------- 分数枚举

def simplest_between(a: Fraction, b: Fraction) -> Fraction:
    """闭区间 [a, b] 中分母最小的分数"""
    fl = math.floor(a)
    if fl == a:
        return Fraction(fl)
    if fl + 1 <= b:
        return Fraction(fl + 1)
    return fl + 1 / simplest_between(1 / (b - fl), 1 / (a - fl))


def fractions_in_window(a: Fraction, b: Fraction, q_lo: int, q_hi: int) -> Iterator[Tuple[Fraction, int]]:
    """
    枚举 [a, b] 中可写成分母 q ∈ [q_lo, q_hi] 的分数值

    产出 (P, q)，q 为 P 的约化分母在范围内的最小倍数
    """
    stack = [(a, b)]
    while stack:
        lo, hi = stack.pop()
        if lo > hi:
            continue
        P = simplest_between(lo, hi)
        den = P.denominator
        if den > q_hi:
            continue
        m = -(-q_lo // den)
        if m * den <= q_hi:
            yield P, m * den
        gap = Fraction(1, den * q_hi)
        stack.append((P + gap, hi))
        stack.append((lo, P - gap))


# ---------------------------------------------------------------- 不等式检查

def _stage_covering(omega: ds.DirectionSet, delta: Fraction) -> ds.Covering:
    if delta == 0:
        if not isinstance(omega, ds.Finite):
            raise DomainError("δ = 0 只适用于有限方向集")
        return omega.cover(Fraction(1, 2))
    return omega.cover(delta)


def check_schedule_inequalities(sched: Schedule, n: int, covering: ds.Covering,
                                C_deriv: Optional[Real] = None) -> InequalityCheck:
    """
    检查第 n 阶段的两个充分条件

        ok₁：2c(n)/R(n)² + C·(|I_{n−1}| + δ_n) < 1/R(n+1)²
        ok₂：|I_{n−1}| − N_n·(2c(n)/R(n)² + δ_n) ≥ (N_n + 1)·|I_n|

    N_n 取实际覆盖的区间个数；slack 为两个相对余量中较小者
    """
    if n < sched.n_start:
        raise DomainError(f"n={n} 小于参数表起点 {sched.n_start}")
    C = to_mpf(C_deriv if C_deriv is not None else sched.C_deriv)
    N = covering.count
    with mp.workprec(config.precision + 64):
        R_n, R_next = sched.R(n), sched.R(n + 1)
        c_n = to_mpf(sched.c(n))
        I_prev, I_n = to_mpf(sched.I_len(n - 1)), to_mpf(sched.I_len(n))
        delta = to_mpf(sched.delta(n))
        width = 2 * c_n / R_n ** 2

        lhs1 = width + C * (I_prev + delta)
        rhs1 = 1 / R_next ** 2
        lhs2 = I_prev - N * (width + delta)
        rhs2 = (N + 1) * I_n
        slack = min((rhs1 - lhs1) / rhs1, (lhs2 - rhs2) / I_prev)
    logger.debug("阶段 %d: N=%d（模型上界 %d）, slack=%s", n, N, sched.N_bound(n),
                 mpmath.nstr(slack, 6))
    return InequalityCheck(bool(lhs1 < rhs1), bool(lhs2 >= rhs2), slack)


# ---------------------------------------------------------------- 角度窗口

def angle_window(omega: ds.DirectionSet) -> AngleWindow:
    """
    选取起始角 α*

    α 限制在 [max(0, θmax − π/3), min(π/2, θmin + π/3)]，使所有 α−θ ∈ [−π/3, π/3]；
    α* 取粗覆盖在窗口内最宽空隙的中点
    """
    with mp.workprec(config.precision):
        third = mp.pi / 3
        coarse = ds.cover(omega, COARSE_DELTA) if not _is_empty(omega) else None
        if coarse is None or coarse.count == 0:
            lo, hi = mpf(0), third
            blocks = []
        else:
            theta_min = min(to_mpf(iv.lo) for iv in coarse.intervals)
            theta_max = max(to_mpf(iv.hi) for iv in coarse.intervals)
            lo = max(mpf(0), theta_max - third)
            hi = min(mp.pi / 2, theta_min + third)
            blocks = sorted((to_mpf(iv.lo), to_mpf(iv.hi)) for iv in coarse.intervals)
        if not lo < hi:
            raise ScheduleInfeasibleError(0, "角度窗口为空，Ω 跨度超过 2π/3")

        # 窗口内最宽空隙
        best_lo, best_hi = lo, lo
        cur = lo
        for b_lo, b_hi in blocks + [(hi, hi)]:
            end = min(b_lo, hi)
            if end - cur > best_hi - best_lo:
                best_lo, best_hi = cur, end
            cur = max(cur, b_hi)
            if cur >= hi:
                break
        if best_hi <= best_lo:
            raise ScheduleInfeasibleError(0, "粗覆盖占满角度窗口")
        alpha = (best_lo + best_hi) / 2
        if alpha >= mp.pi / 2:
            raise ScheduleInfeasibleError(0, "α* 处 tan α 出现极点")

        if blocks:
            worst = max(abs(alpha - blocks[0][0]), abs(alpha - blocks[-1][1]))
            lipschitz = 1 / mpmath.cos(worst) ** 2
        else:
            lipschitz = mpf(1)
        lip = Fraction(math.ceil(float(lipschitz) * 1024), 1024)
    logger.info("角度窗口 [%s, %s]，α* = %s，Lipschitz ≤ %s",
                mpmath.nstr(lo, 8), mpmath.nstr(hi, 8), mpmath.nstr(alpha, 12), lip)
    return AngleWindow(lo, hi, alpha, lip)


def _is_empty(omega: ds.DirectionSet) -> bool:
    return isinstance(omega, ds.Finite) and not omega.angles


# ---------------------------------------------------------------- 单步细化

def _stage_precision(sched: Schedule, n: int) -> int:
    length = sched.I_len(n)
    return (config.precision + length.denominator.bit_length()
            + 2 * sched.q_hi(n).bit_length() + 32)


def _dyadic_exponent(x: Fraction) -> int:
    den = x.denominator
    if den & (den - 1) == 0:
        return den.bit_length() - 1
    return den.bit_length()


def _scan_interval(k: int, vectors: Tuple[Fraction, Fraction, Fraction, Fraction],
                   L: Fraction, U: Fraction, c_n: Fraction,
                   q_lo: int, q_hi: int) -> List[Exclusion]:
    """
    单个覆盖区间上的所有违规分数及其在斜率空间的排除区间

    只做有理运算，可在线程池中执行
    """
    c_lo, d_lo, c_hi, d_hi = vectors
    rho_max = c_n / q_lo ** 2
    y_lo = slope_transform(L, c_hi, d_hi) - rho_max
    y_hi = slope_transform(U, c_lo, d_lo) + rho_max
    found = []
    for P, q in fractions_in_window(y_lo, y_hi, q_lo, q_hi):
        rho = c_n / q ** 2
        lo = inverse_transform(P - rho, c_lo, d_lo)
        hi = inverse_transform(P + rho, c_hi, d_hi)
        if hi < L or lo > U:
            continue
        scale = q // P.denominator
        found.append(Exclusion(k, P.numerator * scale, q, lo, hi))
    return found


def _select_leftmost(L: Fraction, U: Fraction, length: Fraction,
                     exclusions: List[Exclusion]) -> Optional[SlopeInterval]:
    """在 [L, U] 去掉闭排除区间后，取最左的长度为 length 的子区间"""
    blocks = sorted((max(e.lo, L), min(e.hi, U)) for e in exclusions)
    merged: List[List[Fraction]] = []
    for lo, hi in blocks:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])

    bits = max(_dyadic_exponent(L), _dyadic_exponent(length)) + 8
    cur, closed = L, True
    for lo, hi in merged + [[None, None]]:
        end = U if lo is None else lo
        if closed:
            candidates = [cur]
        else:
            # cur 属于排除区间，取严格大于 cur 的二进制有理数
            candidates = [Fraction(math.floor(cur * 2 ** b) + 1, 2 ** b) for b in (bits, bits + 64)]
        for start in candidates:
            stop = start + length
            if (lo is None and stop <= U) or (lo is not None and stop < end):
                return SlopeInterval(start, stop)
        if hi is not None and hi >= cur:
            cur, closed = hi, False
    return None


def refine_step(cert: NestedIntervalCertificate, sched: Schedule,
                omega: ds.DirectionSet, n: int, strict: bool = False) -> NestedIntervalCertificate:
    """
    由 I_{n−1} 构造 I_n

    对 δ_n-覆盖的每个区间找出分母 q ∈ [⌈R(n)⌉, ⌈R(n+1)⌉) 的违规分数，
    去掉对应斜率区间后取最左的长度为 |I_n| 的剩余子区间

    Raises:
        ScheduleInfeasibleError: 没有足够长的剩余子区间
    """
    previous = cert.chain[-1]
    if previous.n != n - 1:
        raise DomainError(f"证书最后阶段为 {previous.n}，不能细化到 {n}")
    omega = ds.effective(omega)
    prec = _stage_precision(sched, n)
    with mp.workprec(prec):
        covering = _stage_covering(omega, sched.delta(n))
    check = check_schedule_inequalities(sched, n, covering, cert.c_deriv)
    if not check.ok1:
        logger.warning("阶段 %d 不满足第一个不等式，排除分数可能不唯一", n)
    if not check.ok2:
        if strict:
            raise ScheduleInfeasibleError(n, "第二个不等式不成立")
        logger.warning("阶段 %d 不满足第二个不等式，按实际排除集继续", n)

    L, U = previous.interval.lo, previous.interval.hi
    c_n = sched.c(n)
    q_lo, q_hi = sched.q_lo(n), sched.q_hi(n)
    args = (L, U, c_n, q_lo, q_hi)

    # mpmath 的精度是全局状态，方向向量在当前线程里算好
    with mp.workprec(prec):
        eta = mpmath.ldexp(mpf(1), -(prec - 8))
        items = []
        for k, iv in enumerate(covering.intervals):
            c_lo, d_lo = _direction_vector(iv.lo, -2 * eta)
            c_hi, d_hi = _direction_vector(iv.hi, 2 * eta)
            items.append((k, (c_lo, d_lo, c_hi, d_hi)))
    if config.workers > 1 and len(items) > 64:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda kv: _scan_interval(kv[0], kv[1], *args), items))
    else:
        results = [_scan_interval(k, vec, *args) for k, vec in items]
    exclusions = sorted((e for group in results for e in group), key=lambda e: (e.index, e.q, e.p))

    chosen = _select_leftmost(L, U, sched.I_len(n), exclusions)
    if chosen is None:
        raise ScheduleInfeasibleError(n, f"{len(exclusions)} 个排除区间覆盖了 I_{n - 1}")
    cert.chain.append(StageRecord(n, chosen, exclusions, check, covering.count))
    logger.info("阶段 %d: q∈[%d, %d]，覆盖 %d 个区间，排除 %d 个分数，ok1=%s ok2=%s",
                n, q_lo, q_hi, covering.count, len(exclusions), check.ok1, check.ok2)
    return cert


# ---------------------------------------------------------------- 主流程

def natural_psi(sched: Schedule) -> PsiFunction:
    """参数表族对应的 ψ：有限集常数，缺项 log²，M 阶 log^{2M}，Minkowski 幂次"""
    if isinstance(sched, FiniteSetSchedule):
        return PsiFunction.constant(1)
    if isinstance(sched, OrderMSchedule):
        return PsiFunction.log_power(1, 2 * sched.M)
    if isinstance(sched, LacunarySchedule):
        return PsiFunction.log_power(1, 2)
    if isinstance(sched, MinkowskiSchedule):
        a = to_fraction(sched.a)
        return PsiFunction.power(1, 2 * (a * a - 1))
    raise DomainError(f"未知参数表 {sched.kind}")


def _stage_limit(sched: Schedule) -> int:
    """满足 R(n+1) ≤ r_cap 且 |I_n| ≥ 2^{−bits} 的最大 n"""
    floor = Fraction(1, 2 ** config.interval_bits_cap)
    n = sched.n_start
    with mp.workprec(config.precision):
        while sched.R(n + 2) <= config.r_cap and sched.I_len(n + 1) >= floor:
            n += 1
    return n


def find_start_stage(sched: Schedule, omega: ds.DirectionSet, c_deriv: Fraction) -> int:
    """n₀：两个不等式都成立的最小阶段；找不到时退回第一个不等式成立的最小阶段"""
    omega = ds.effective(omega)
    limit = _stage_limit(sched)
    first_ok1 = None
    for n in range(sched.n_start, limit + 1):
        with mp.workprec(_stage_precision(sched, n)):
            covering = _stage_covering(omega, sched.delta(n))
        check = check_schedule_inequalities(sched, n, covering, c_deriv)
        if check.ok1 and check.ok2:
            logger.info("n₀ = %d", n)
            return n
        if check.ok1 and first_ok1 is None:
            first_ok1 = n
    if first_ok1 is None:
        raise ScheduleInfeasibleError(sched.n_start, "没有阶段满足第一个不等式")
    logger.warning("阶段上限内两个不等式从未同时成立，n₀ 退回 %d", first_ok1)
    return first_ok1


def _initial_interval(sched: Schedule, n0: int, alpha: mpf) -> SlopeInterval:
    length = sched.I_len(n0 - 1)
    bits = _dyadic_exponent(length) + 8
    with mp.workprec(config.precision + bits):
        centre = to_fraction(mpmath.tan(alpha))
    lo = Fraction(math.floor((centre - length / 2) * 2 ** bits), 2 ** bits)
    return SlopeInterval(lo, lo + length)


def find_angle(omega: ds.DirectionSet, sched: Optional[Schedule] = None,
               n_max: Optional[int] = None, strict: bool = False) -> Tuple[Fraction, NestedIntervalCertificate]:
    """
    构造满足分阶段不等式的斜率 t = tan α

    Args:
        omega: 方向集合（include_axes 时并入坐标轴方向）
        sched: 参数表，默认按方向集合类型选取
        n_max: 最后一个阶段，默认由 r_cap 与区间精度上限决定
        strict: 第二个不等式不成立时直接报错

    Returns:
        (最终区间中点斜率, 证书)

    Raises:
        ScheduleInfeasibleError: 某阶段没有剩余子区间
        PrecisionExhaustedError: n_max 超出区间精度上限
    """
    sched = sched or schedule_for(omega)
    omega_eff = ds.effective(omega)
    window = angle_window(omega_eff)
    c_deriv = max(sched.C_deriv, window.lipschitz)

    floor = Fraction(1, 2 ** config.interval_bits_cap)
    if n_max is not None:
        for n in range(sched.n_start, n_max + 1):
            if sched.I_len(n) < floor:
                raise PrecisionExhaustedError(stage=n, detail=f"|I_n| < 2^-{config.interval_bits_cap}")
        cap = f"n_max={n_max}"
    else:
        n_max = _stage_limit(sched)
        cap = f"r_cap={config.r_cap}, interval_bits_cap={config.interval_bits_cap}"

    n0 = find_start_stage(sched, omega_eff, c_deriv)
    if n_max < n0:
        raise ScheduleInfeasibleError(n0, f"n_max={n_max} 小于 n₀={n0}")

    cert = NestedIntervalCertificate(sched, omega, window, c_deriv, cap=cap)
    cert.chain.append(StageRecord(n0 - 1, _initial_interval(sched, n0, window.alpha)))
    for n in range(n0, n_max + 1):
        refine_step(cert, sched, omega_eff, n, strict=strict)

    psi = natural_psi(sched)
    extend_small_q(cert, psi)
    q_range = cert.verified_q_range
    logger.info("证书完成: 阶段 %d..%d，q ∈ [%d, %d]，全局常数 %s",
                n0, n_max, q_range[0], q_range[1], mpmath.nstr(cert.global_constant, 8))
    return cert.slope, cert


# ---------------------------------------------------------------- 小分母延拓

def certificate_psi(cert: NestedIntervalCertificate) -> PsiFunction:
    """证书诱导的阶梯 ψ(q) = 1/c(stage(q))"""
    stages = cert.stages
    if not stages:
        raise DomainError("证书没有已认证阶段")
    breakpoints = [cert.schedule.q_lo(s.n) for s in stages]
    values = [1 / cert.schedule.c(s.n) for s in stages]
    return PsiFunction.stepwise(breakpoints, values)


def small_q_constant(c_prime: Real, q0: int, psi: PsiFunction) -> mpf:
    """c'' = c'·ψ(2)/(q₀²·ψ(2q₀))"""
    if q0 < 1:
        raise DomainError("q₀ 必须 ≥ 1")
    with mp.workprec(config.precision):
        return to_mpf(c_prime) * psi(2) / (mpf(q0) ** 2 * psi(2 * q0))


def extend_small_q(cert: NestedIntervalCertificate, psi: PsiFunction) -> mpf:
    """
    把 [q₀, q_max] 上的认证延拓到所有 q ≥ 1

    c' = min_n c(n)·ψ(⌈R(n)⌉)；q ≥ 2 由 c'' 覆盖，q = 1 直接暴力验证，
    存入证书的常数为两者较小者
    """
    q_range = cert.verified_q_range
    if q_range is None or q_range[0] > q_range[1]:
        raise DomainError("证书的已认证 q 范围为空")
    q0, q_max = q_range
    if q0 > 2 and 2 * q0 > q_max:
        raise DomainError(f"已认证范围 [{q0}, {q_max}] 不足以延拓到 q < q₀")
    with mp.workprec(config.precision):
        c_prime = min(to_mpf(cert.schedule.c(s.n)) * psi(cert.schedule.q_lo(s.n))
                      for s in cert.stages)
        c_second = small_q_constant(c_prime, q0, psi)
        q1 = _margin_scan(cert.slope, cert.omega, 1, psi, config.rep_budget, 1)
        constant = min(c_second, q1.margin)
    cert.global_constant = constant
    cert.psi = psi
    return constant


# ---------------------------------------------------------------- 独立验证

@dataclass(frozen=True)
class MarginReport:
    """min q²ψ(q)|tan(α−θ) − p/q| 及见证"""
    margin: mpf
    q: int
    p: int
    direction: ds.Angle
    checked: int


LIMB_BITS = 32
LIMBS = 6
_MASK = np.uint64((1 << LIMB_BITS) - 1)


def _frac_limbs(y: Fraction) -> np.ndarray:
    """{y} 的定点表示，LIMBS 个 32 位字，高位在前"""
    frac = y - math.floor(y)
    total = LIMB_BITS * LIMBS
    value = math.floor(frac * (1 << total))
    limbs = [(value >> (LIMB_BITS * (LIMBS - 1 - i))) & ((1 << LIMB_BITS) - 1) for i in range(LIMBS)]
    return np.array(limbs, dtype=np.uint64)


def _nearest_distance(limbs: np.ndarray, qs: np.ndarray) -> np.ndarray:
    """‖q·y‖ 的 float64 近似（先做精确的多字乘法再取高 64 位）"""
    carry = np.zeros_like(qs)
    words = [None] * LIMBS
    for i in range(LIMBS - 1, -1, -1):
        acc = qs * limbs[i] + carry
        words[i] = acc & _MASK
        carry = acc >> np.uint64(LIMB_BITS)
    top = (words[0] << np.uint64(LIMB_BITS)) | words[1]
    complement = (~top) + np.uint64(1)
    dist = np.minimum(top, complement)
    return dist.astype(np.float64) * 2.0 ** -64


def _psi_vector(psi: PsiFunction, qs: np.ndarray) -> np.ndarray:
    q = qs.astype(np.float64)
    if psi.kind == "constant":
        return np.full_like(q, float(psi.C))
    if psi.kind == "log_power":
        return float(psi.C) * np.maximum(1.0, np.log2(q)) ** float(psi.exponent)
    if psi.kind == "power":
        return float(psi.C) * q ** float(psi.exponent)
    index = np.searchsorted(np.array(psi.breakpoints), qs, side="right") - 1
    values = np.array([float(v) for v in psi.values])
    return values[np.maximum(index, 0)]


def _margin_scan(slope: Real, omega: ds.DirectionSet, Q: int, psi: PsiFunction,
                 rep_budget: int, q_min: int, recheck: int = 8) -> MarginReport:
    if Q >= 1 << LIMB_BITS:
        raise DomainError("Q 超出定点乘法范围")
    exact_prec = LIMB_BITS * LIMBS + 64
    with mp.workprec(max(config.precision, exact_prec)):
        directions = ds.representatives(ds.effective(omega), rep_budget)
        qs = np.arange(q_min, Q + 1, dtype=np.uint64)
        psis = _psi_vector(psi, qs)
        candidates = []
        for theta in directions:
            y = to_fraction(tan_difference(slope, theta))
            approx = qs.astype(np.float64) * psis * _nearest_distance(_frac_limbs(y), qs)
            take = min(recheck, len(qs))
            for j in np.argpartition(approx, take - 1)[:take]:
                candidates.append((float(approx[j]), int(qs[j]), theta))
        candidates.sort(key=lambda item: item[0])

        best = None
        for _, q, theta in candidates[:recheck]:
            y = tan_difference(slope, theta)
            p = int(mpmath.nint(q * y))
            margin = mpf(q) ** 2 * psi(q) * abs(y - mpf(p) / q)
            if best is None or margin < best.margin:
                best = MarginReport(margin, q, p, theta, len(directions) * len(qs))
    return best


def verify_certificate(slope: Real, omega: ds.DirectionSet, Q: int, psi: PsiFunction,
                       rep_budget: int, q_min: int = 1) -> MarginReport:
    """
    暴力验证：对 rep_budget 个代表方向与 q_min ≤ q ≤ Q 计算
    q²ψ(q)|tan(α−θ) − p/q| 的最小值，不依赖嵌套区间构造
    """
    if Q < 2:
        raise DomainError("Q 必须 ≥ 2")
    if not 1 <= q_min <= Q:
        raise DomainError("需要 1 ≤ q_min ≤ Q")
    report = _margin_scan(slope, omega, Q, psi, rep_budget, q_min)
    logger.info("验证: margin=%s，q=%d，方向 %s，共 %d 组", mpmath.nstr(report.margin, 8),
                report.q, report.direction, report.checked)
    return report
