"""边界单元分解与单边锯齿和测试"""
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from errors import DegeneratePositionError, DomainError
from geometry import LatticeSpec, Rectangle
from discrepancy import Side, sawtooth_side_sum, square_decomposition_check

F = Fraction
UNIT = LatticeSpec(F(0), F(1), (F(0), F(0)))


def _random_rectangle(rng: random.Random, max_side: int) -> Rectangle:
    center = (F(rng.randrange(-4000, 4000), 997), F(rng.randrange(-4000, 4000), 991))
    width = F(rng.randrange(100, 100 * max_side), 101)
    height = F(rng.randrange(100, 100 * max_side), 103)
    phi = F(rng.randrange(0, 3141), 1000)
    return Rectangle(center, width, height, phi)


def _check_many(count: int, max_side: int, seed: int):
    rng = random.Random(seed)
    spec = LatticeSpec(F(1, 3), F(1), (F(1, 7), F(2, 9)))
    checked = 0
    while checked < count:
        R = _random_rectangle(rng, max_side)
        try:
            check = square_decomposition_check(R, spec)
        except DegeneratePositionError:
            continue
        assert check.residual == 0
        checked += 1


def test_axis_rectangle_on_unit_lattice(unit_lattice):
    R = Rectangle.axis_aligned(F(3, 10), F(26, 5), F(2, 5), F(37, 10))
    check = square_decomposition_check(R, unit_lattice)
    # x ∈ {1..5}，y ∈ {1..3}
    assert check.direct == 15 - F(49, 10) * F(33, 10)
    assert check.residual == 0
    assert check.corner_cells == 4


def test_rectangle_inside_one_cell(unit_lattice):
    R = Rectangle.axis_aligned(F(1, 10), F(3, 10), F(1, 10), F(1, 5))
    check = square_decomposition_check(R, unit_lattice)
    assert check.direct == -F(1, 50)
    assert check.decomposed == -F(1, 50)
    assert check.corner_cells == 1
    assert check.side_cells == 0


def test_rotated_rectangles_decompose_exactly():
    _check_many(25, max_side=5, seed=17)


@pytest.mark.slow
def test_rotated_rectangles_decompose_exactly_at_scale():
    _check_many(500, max_side=14, seed=2024)


def test_lattice_point_on_boundary_is_degenerate(unit_lattice):
    R = Rectangle.axis_aligned(F(0), F(23, 10), F(2, 5), F(8, 5))
    with pytest.raises(DegeneratePositionError):
        square_decomposition_check(R, unit_lattice)


def test_vertex_on_cell_boundary_is_degenerate(unit_lattice):
    R = Rectangle.axis_aligned(F(1, 2), F(23, 10), F(2, 5), F(8, 5))
    with pytest.raises(DegeneratePositionError):
        square_decomposition_check(R, unit_lattice)


def test_horizontal_side(unit_lattice):
    result = sawtooth_side_sum(Side(0, F(33, 10), 0), range(10), unit_lattice)
    # 每列 ψ(3.3) = −0.2
    assert result.sawtooth == 2
    assert result.direct == 2
    assert result.difference == 0

    result = sawtooth_side_sum(Side(0, F(33, 10), 0, below=False), range(10), unit_lattice)
    assert result.sawtooth == result.direct == -2


def test_side_through_lattice_row(unit_lattice):
    # 下方区域默认不含边界：每列 −1/2
    open_side = sawtooth_side_sum(Side(0, 3, 0), range(10), unit_lattice)
    assert open_side.sawtooth == open_side.direct == -5
    closed_side = sawtooth_side_sum(Side(0, 3, 0, closed=True), range(10), unit_lattice)
    assert closed_side.sawtooth == closed_side.direct == 5


fractions = st.fractions(min_value=-5, max_value=5, max_denominator=30)


@settings(deadline=None, max_examples=60)
@given(a1=fractions, a2=fractions,
       slope=st.fractions(min_value=-3, max_value=3, max_denominator=20),
       shift=st.tuples(st.fractions(0, 1, max_denominator=12), st.fractions(0, 1, max_denominator=12)),
       below=st.booleans(), closed=st.sampled_from([None, True, False]),
       start=st.integers(-5, 5), length=st.integers(1, 25))
def test_sawtooth_equals_direct_count(a1, a2, slope, shift, below, closed, start, length):
    spec = LatticeSpec(F(0), F(1), shift)
    result = sawtooth_side_sum(Side(a1, a2, slope, below, closed), range(start, start + length),
                               spec)
    assert result.sawtooth == result.direct


@settings(deadline=None, max_examples=40)
@given(a2=fractions, slope=st.fractions(min_value=-1, max_value=1, max_denominator=40),
       below=st.booleans(), length=st.integers(1, 40))
def test_sawtooth_bounded_by_star_discrepancy(a2, slope, below, length):
    # closed = below 时用通常的 ψ
    side = Side(0, a2, slope, below, closed=below)
    result = sawtooth_side_sum(side, range(1, length + 1), UNIT)
    assert abs(float(result.sawtooth)) <= result.star_bound + 1e-9


@pytest.mark.parametrize("I", [range(0), range(0, 10, 2)])
def test_side_sum_rejects_bad_range(unit_lattice, I):
    with pytest.raises(DomainError):
        sawtooth_side_sum(Side(0, 1, 0), I, unit_lattice)
