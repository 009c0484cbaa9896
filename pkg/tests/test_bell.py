"""Bell polynomials and series-coefficient families against independent oracles."""

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from taulap.bell import (
    InsufficientArguments,
    bell,
    binomial,
    reciprocal_coefficient,
    resolvent_coefficient,
    resolvent_coefficient_t,
)
from taulap.ring import MomentPoly, convert, double_factorial

F = Fraction


# -- Bell polynomial against the sympy oracle ---------------------------------

def test_bell_matches_sympy_oracle() -> None:
    syms = sympy.symbols("x1:10")
    for n in range(0, 9):
        for k in range(0, n + 1):
            xs = [F(i + 2, 2 * i + 1) for i in range(n - k + 1)]
            ours = bell(n, k, xs)
            theirs = sympy.bell(n, k, syms[: max(n - k + 1, 1)]).subs(
                {s: sympy.Rational(x) for s, x in zip(syms, xs)}
            )
            assert sympy.Rational(ours) == theirs


def test_bell_boundary_cases() -> None:
    assert bell(0, 0, []) == 1
    assert bell(3, 0, []) == 0
    assert bell(0, 2, []) == 0
    assert bell(4, 6, [1] * 10) == 0
    with pytest.raises(InsufficientArguments):
        bell(5, 2, [F(1), F(2)])


@settings(max_examples=25, deadline=None)
@given(
    st.integers(min_value=1, max_value=10),
    st.integers(min_value=0, max_value=9),
    st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=7),
             min_size=10, max_size=10),
)
def test_bell_index_shift_identity(n: int, k: int, xs: list) -> None:
    """sum_j C(n,j) x_j B_{n-j,k} = (k+1) B_{n,k+1} for generic arguments."""
    if k + 1 > n:
        left = sum(binomial(n, j) * xs[j - 1] * bell(n - j, k, xs) for j in range(1, n - k + 1)) if n - k >= 1 else 0
        assert left == 0 == (k + 1) * bell(n, k + 1, xs)
        return
    left = sum(binomial(n, j) * xs[j - 1] * bell(n - j, k, xs) for j in range(1, n - k + 1))
    assert left == (k + 1) * bell(n, k + 1, xs)


# -- reciprocal-series coefficients S_m ----------------------------------------

def _reciprocal_series_oracle(mmax: int) -> list[MomentPoly]:
    """b_m of (sum r_l tau^l / r0)^(-1) via the defining recurrence; S_m = m! b_m."""
    bs = [MomentPoly.one()]
    for m in range(1, mmax + 1):
        total = MomentPoly.zero()
        for k in range(1, m + 1):
            total = total + MomentPoly.variable(k) * MomentPoly.unit_power(-1) * bs[m - k]
        bs.append(-total)
    return bs


def test_reciprocal_coefficients_match_series_oracle() -> None:
    from math import factorial

    oracle = _reciprocal_series_oracle(8)
    for m in range(9):
        assert reciprocal_coefficient(m) == oracle[m].scale(factorial(m))


def test_reciprocal_coefficients_frozen() -> None:
    assert reciprocal_coefficient(0) == MomentPoly.one()
    assert reciprocal_coefficient(1) == MomentPoly({(-1, 1): -1})
    assert reciprocal_coefficient(2) == MomentPoly({(-2, 2): 2, (-1, 0, 1): -2})


def test_reciprocal_is_series_inverse() -> None:
    """(sum_m S_m tau^m / m!) * (sum_l r_l tau^l) = r0 order by order."""
    from math import factorial

    mmax = 7
    for order in range(1, mmax + 1):
        total = MomentPoly.zero()
        for j in range(order + 1):
            total = total + reciprocal_coefficient(j).scale(
                F(1, factorial(j))
            ) * MomentPoly.variable(order - j)
        assert total.is_zero, f"order {order} fails"


# -- resolvent-series coefficients R_m -----------------------------------------

def _resolvent_series_oracle(mmax: int) -> list[MomentPoly]:
    """R_m via the defining ratio recurrence r0 R_m = N_m - sum r_k R_{m-k}."""
    out: list[MomentPoly] = []
    for m in range(mmax + 1):
        num = MomentPoly.variable(m).scale(F(1, 3 + 2 * m)) if m else MomentPoly.unit_power(1).scale(F(1, 3))
        total = num
        for k in range(1, m + 1):
            total = total - MomentPoly.variable(k) * out[m - k]
        out.append(total * MomentPoly.unit_power(-1))
    return out


def test_resolvent_coefficients_match_series_oracle() -> None:
    oracle = _resolvent_series_oracle(8)
    for m in range(9):
        assert resolvent_coefficient(m) == oracle[m]


def test_resolvent_coefficients_frozen() -> None:
    assert resolvent_coefficient(0) == MomentPoly.constant(F(1, 3))
    assert resolvent_coefficient(1) == MomentPoly({(-1, 1): F(-2, 15)})
    assert resolvent_coefficient(2) == MomentPoly({
        (-2, 2): F(2, 15), (-1, 0, 1): F(-4, 21),
    })
    assert resolvent_coefficient(3) == MomentPoly({
        (-3, 3): F(-2, 15), (-2, 1, 1): F(34, 105), (-1, 0, 0, 1): F(-2, 9),
    })


def test_resolvent_display_form_matches_converted_form() -> None:
    for m in range(7):
        expected = convert(resolvent_coefficient(m), "rho", "t").scale(
            double_factorial(2 * m - 1)
        )
        assert resolvent_coefficient_t(m) == expected


def test_resolvent_weights() -> None:
    for m in range(6):
        assert resolvent_coefficient(m).weight() == m
        assert reciprocal_coefficient(m).weight() == m
