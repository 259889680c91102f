"""L² 差异度测试"""
from fractions import Fraction

import pytest

from errors import DomainError
from geometry import Rectangle
from discrepancy import (RectangleFamilySpec, Side, best_shift, l2_fourier_side_identity,
                         l2_shift_discrepancy)
from discrepancy.l2 import halton, shift_scan

F = Fraction


@pytest.mark.parametrize("x1, expected", [(F(1), 0.0), (F(2), 0.0)])
def test_whole_cells_have_no_shift_discrepancy(unit_lattice, x1, expected):
    R = Rectangle.axis_aligned(F(0), x1, F(0), F(1))
    assert l2_shift_discrepancy(R, unit_lattice, Q=16) == pytest.approx(expected, abs=1e-12)


def test_half_cell_shift_discrepancy(unit_lattice):
    # 平移的一半给出 2 个点，另一半给出 1 个：D = ±1/2
    R = Rectangle.axis_aligned(F(0), F(3, 2), F(0), F(1))
    assert l2_shift_discrepancy(R, unit_lattice) == pytest.approx(0.25, abs=1e-3)


@pytest.mark.parametrize("Q", [-1, 0, 1])
def test_shift_discrepancy_rejects_bad_q(unit_lattice, Q):
    with pytest.raises(DomainError):
        l2_shift_discrepancy(Rectangle.axis_aligned(F(0), F(1), F(0), F(1)), unit_lattice, Q=Q)


def test_shift_discrepancy_smallest_grid(unit_lattice):
    # Q = 2：两个 x 平移各给 1 或 2 个点，D = ±1/2
    R = Rectangle.axis_aligned(F(0), F(3, 2), F(0), F(1))
    assert l2_shift_discrepancy(R, unit_lattice, Q=2) == pytest.approx(0.25, abs=1e-12)


def test_fourier_identity_single_term():
    result = l2_fourier_side_identity(Side(0, 0, F(1, 3)), range(0, 1), nu_max=1000)
    # ∫₀¹ ψ² = 1/12
    assert result.lhs == pytest.approx(1 / 12, abs=1e-12)
    assert result.rhs < result.lhs
    assert result.holds


@pytest.mark.parametrize("slope, length", [
    (F(1, 3), 5),
    (F(2, 7), 12),
    (F(13, 64), 30),
    (F(89, 144), 40),
    (F(-5, 8), 16),
])
def test_fourier_identity_holds(slope, length):
    side = Side(F(1, 5), F(2, 3), slope)
    result = l2_fourier_side_identity(side, range(3, 3 + length), nu_max=2000)
    assert result.holds
    assert result.lhs - result.rhs <= result.tail_bound + 1e-9


def test_fourier_identity_rejects_bad_input():
    with pytest.raises(DomainError):
        l2_fourier_side_identity(Side(0, 0, F(1, 3)), range(0), nu_max=10)
    with pytest.raises(DomainError):
        l2_fourier_side_identity(Side(0, 0, F(1, 3)), range(0, 4), nu_max=10, Q=0)


@pytest.mark.parametrize("index, base, expected", [
    (0, 2, F(0)), (1, 2, F(1, 2)), (2, 2, F(1, 4)), (3, 2, F(3, 4)),
    (1, 3, F(1, 3)), (5, 3, F(7, 9)),
])
def test_halton(index, base, expected):
    assert halton(index, base) == expected


@pytest.fixture
def small_family():
    return RectangleFamilySpec.geometric([0.0], 0.2, 0.5, steps=2)


def test_shift_scan_candidates(small_family):
    scan = shift_scan(F(1, 2), 16, small_family, K=4)
    assert [shift for shift, _ in scan] == [
        (F(0), F(0)), (F(1, 2), F(1, 3)), (F(1, 4), F(2, 3)), (F(3, 4), F(1, 9))]
    assert all(value >= 0 for _, value in scan)


def test_best_shift_picks_minimum(small_family):
    scan = shift_scan(F(1, 2), 16, small_family, K=6)
    shift, value = best_shift(F(1, 2), 16, small_family, K=6)
    assert value == min(v for _, v in scan)
    assert (shift, value) in scan


def test_best_shift_single_candidate(small_family):
    shift, value = best_shift(F(1, 2), 9, small_family, K=1)
    assert shift == (F(0), F(0))
    assert value == shift_scan(F(1, 2), 9, small_family, K=1)[0][1]


def test_shift_scan_rejects_bad_k(small_family):
    with pytest.raises(DomainError):
        shift_scan(F(1, 2), 9, small_family, K=0)
