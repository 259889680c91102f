"""
一维差异度
星差异度的排序闭式、{nθ} 序列以及 Erdős–Turán 上界
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from config import config
from errors import DomainError, RationalDirectionError
from numtheory import Real, nearest_int_dist, to_fraction

logger = logging.getLogger(__name__)


def star_discrepancy_1d(omega: Sequence[Real]) -> Real:
    """
    sup_x |#{ωᵢ ∈ [0, x)} − N·x|（未归一化）

    用排序闭式 N·(1/(2N) + max_i |ω_(i) − (2i−1)/(2N)|)；
    全为有理数时返回精确 Fraction，否则返回 float
    """
    N = len(omega)
    if N < 1:
        raise DomainError("序列不能为空")
    if all(isinstance(w, (int, Fraction)) for w in omega):
        values = sorted(Fraction(w) for w in omega)
        if values[0] < 0 or values[-1] >= 1:
            raise DomainError("序列必须位于 [0, 1)")
        worst = max(abs(w - Fraction(2 * i + 1, 2 * N)) for i, w in enumerate(values))
        return N * (Fraction(1, 2 * N) + worst)
    values = np.sort(np.asarray([float(w) for w in omega], dtype=np.float64))
    if values[0] < 0 or values[-1] >= 1:
        raise DomainError("序列必须位于 [0, 1)")
    targets = (2 * np.arange(N) + 1) / (2.0 * N)
    return float(N * (1.0 / (2 * N) + np.max(np.abs(values - targets))))


def ntheta_points(theta: Real, N: int, start: int = 1) -> np.ndarray:
    """{nθ}，n = start..start+N−1；θ 先精确化为有理数再做整数取模"""
    t = to_fraction(theta)
    a, b = t.numerator, t.denominator
    return np.array([((n * a) % b) / b for n in range(start, start + N)], dtype=np.float64)


def seq_discrepancy_ntheta(theta: Real, N: int) -> float:
    """{nθ : n = 1..N} 的星差异度"""
    if N < 1:
        raise DomainError("N 必须 ≥ 1")
    return star_discrepancy_1d(ntheta_points(theta, N))


@dataclass(frozen=True)
class ThetaSequence:
    """{nθ}，n = 1..N，用于 Erdős–Turán 的特化形式"""
    theta: Real
    N: int


def erdos_turan_bound(omega: Union[Sequence[Real], ThetaSequence], m: int) -> float:
    """
    C_ET·(N/m + Σ_{h=1}^m (1/h)|Σ_n e^{2πi h ωₙ}|)

    ThetaSequence 时内层和用 1/(2‖hθ‖) 代替

    Raises:
        RationalDirectionError: 特化形式中 ‖hθ‖ = 0
    """
    if m < 1:
        raise DomainError("m 必须 ≥ 1")
    c_et = float(config.c_et)
    if isinstance(omega, ThetaSequence):
        N = omega.N
        t = to_fraction(omega.theta)
        total = 0.0
        for h in range(1, m + 1):
            dist = nearest_int_dist(h * t)
            if dist == 0:
                raise RationalDirectionError(h)
            total += 1.0 / (h * 2.0 * float(dist))
        return c_et * (N / m + total)

    values = np.asarray([float(w) for w in omega], dtype=np.float64)
    N = len(values)
    if N < 1:
        raise DomainError("序列不能为空")
    hs = np.arange(1, m + 1, dtype=np.float64)
    phases = np.exp(2j * np.pi * np.outer(hs, values))
    sums = np.abs(phases.sum(axis=1))
    return c_et * (N / m + float(np.sum(sums / hs)))


def erdos_turan_optimal_m(N: int, psi) -> int:
    """log 型 ψ 取 m ≈ N，幂型 ψ（指数 τ）取 m ≈ N^{1/(τ+1)}"""
    if N < 1:
        raise DomainError("N 必须 ≥ 1")
    if psi.is_power_type:
        tau = float(psi.exponent)
        return max(1, round(N ** (1.0 / (tau + 1.0))))
    return N
