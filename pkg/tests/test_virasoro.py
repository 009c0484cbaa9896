"""Tests for the graded constraint operators on the stable partition series."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taulap.laplacian import free_energy, stable_partition
from taulap.ring import MomentPoly, RingError
from taulap.virasoro import (
    GradedSeries,
    constraint_residuals,
    constraint_satisfied,
    quadratic_part,
    raising_part,
    scaling_constraint,
    stable_series,
    witt_defect,
)


def test_stable_series_orders():
    series = stable_series(4)
    assert series.max_order == 3
    assert series.order(0) == MomentPoly.one()
    assert series.order(1) == free_energy(2, "rho")
    assert series.order(2) == stable_partition().z(3)
    with pytest.raises(RingError):
        series.order(4)
    with pytest.raises(RingError):
        stable_series(0)


def test_scaling_constraint_kills_free_energies():
    for g in range(2, 7):
        assert scaling_constraint(free_energy(g, "rho")).is_zero


def test_scaling_constraint_eigenvalues():
    # each monomial is an eigenvector with eigenvalue sum((3+2j) e_j) / 2
    mono = MomentPoly.monomial((-2, 2), 1)  # rho_1^2 / rho_0^2
    assert scaling_constraint(mono) == mono.scale(F(5 * 2 + 3 * (-2), 2))
    mono = MomentPoly.monomial((0, 0, 3), 1)  # rho_2^3
    assert scaling_constraint(mono) == mono.scale(F(21, 2))


def test_raising_part_label_validation():
    with pytest.raises(RingError):
        raising_part(-1, MomentPoly.one())


def test_quadratic_part_grade_zero_vanishes():
    assert quadratic_part(0, free_energy(2, "rho")).is_zero


def test_quadratic_constants_on_unit_argument():
    one = MomentPoly.one()
    b1 = MomentPoly.monomial((-4, 2), F(49, 64)) + MomentPoly.monomial(
        (-3, 0, 1), F(-5, 8)
    )
    assert quadratic_part(1, one) == b1
    assert quadratic_part(2, one) == MomentPoly.monomial((-3, 1), F(-49, 32))
    assert quadratic_part(3, one) == MomentPoly.unit_power(-2).scale(F(105, 64))
    for n in range(4, 9):
        assert quadratic_part(n, one).is_zero


def test_first_order_balances_quadratic_constant():
    # the order-one residual of the first constraint forces the constant term
    balance = raising_part(1, free_energy(2, "rho")).scale(4)
    expected = MomentPoly.monomial((-4, 2), F(-49, 64)) + MomentPoly.monomial(
        (-3, 0, 1), F(5, 8)
    )
    assert balance == expected


def test_all_constraints_vanish_on_stable_series():
    series = stable_series(5)
    for n in range(0, 18):
        assert constraint_satisfied(n, series), f"constraint {n} violated"


def test_residual_grading_structure():
    series = stable_series(3)
    residuals = constraint_residuals(2, series)
    assert sorted(residuals) == [0, 1, 2]
    assert all(r.is_zero for r in residuals.values())


def test_perturbed_series_violates_constraints():
    good = stable_series(3)
    noisy = list(good.orders)
    noisy[1] = noisy[1] + MomentPoly.monomial((-5, 3), F(1, 7))
    bad = GradedSeries(tuple(noisy))
    assert not constraint_satisfied(1, bad)


@settings(max_examples=25, deadline=None)
@given(
    st.integers(min_value=0, max_value=6),
    st.integers(min_value=0, max_value=6),
    st.dictionaries(
        st.tuples(
            st.integers(min_value=-3, max_value=2),
            st.integers(min_value=0, max_value=3),
            st.integers(min_value=0, max_value=2),
            st.integers(min_value=0, max_value=2),
        ),
        st.fractions(min_value=-4, max_value=4).filter(bool),
        max_size=4,
    ),
)
def test_witt_bracket(m, n, data):
    probe = MomentPoly.zero()
    for key, coeff in data.items():
        probe = probe + MomentPoly.monomial(key, coeff)
    assert witt_defect(m, n, probe).is_zero


def test_witt_bracket_on_free_energy():
    probe = free_energy(3, "rho")
    for m, n in [(0, 1), (1, 3), (2, 4), (0, 9)]:
        assert witt_defect(m, n, probe).is_zero
