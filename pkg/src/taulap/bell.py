"""Partial Bell polynomials and the series-coefficient families built from them.

Two families of moment polynomials recur throughout the Laplacian and the
constraint operators:

* ``S_m`` -- ``m!`` times the ``tau^m`` coefficient of the reciprocal series
  ``(sum_l r_l tau^l / r0)^(-1)``;
* ``R_m`` -- the ``z^(2m)`` coefficient of the ratio
  ``(sum_l r_l z^(2l) / (3+2l)) / (sum_l r_l z^(2l))``.

Both have closed forms as Bell-polynomial sums, which is how they are built
here; the series recurrences serve as independent oracles in the tests.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Sequence

from taulap.ring import (
    MomentPoly,
    RingError,
    double_factorial,
)


class InsufficientArguments(RingError):
    """A Bell polynomial was asked for with too few arguments."""


def _partition_vectors(n: int, k: int):
    """Yield multiplicity vectors ``(j_1, ..., j_n)`` with sum k, weighted sum n."""

    def rec(remaining_n: int, remaining_k: int, part: int, acc: list[int]):
        if remaining_k == 0:
            if remaining_n == 0:
                yield list(acc)
            return
        if part > remaining_n or remaining_n > part_max(part, remaining_k):
            return
        max_count = min(remaining_k, remaining_n // part)
        for count in range(max_count + 1):
            acc.append(count)
            yield from rec(remaining_n - count * part, remaining_k - count, part + 1, acc)
            acc.pop()

    def part_max(part: int, remaining_k: int) -> int:
        # crude upper bound: all remaining parts as large as possible
        return remaining_k * n

    yield from rec(n, k, 1, [])


def bell(n: int, k: int, xs: Sequence[object]) -> object:
    """Partial exponential Bell polynomial ``B_{n,k}(x_1, ..., x_{n-k+1})``.

    Generic over any commutative ring element supporting ``+`` and ``*`` with
    integers; returns an int for empty sums so it composes with any ring.
    """
    if n < 0 or k < 0:
        raise RingError("Bell polynomial indices must be nonnegative")
    if k == 0:
        return 1 if n == 0 else 0
    if n == 0 or k > n:
        return 0
    needed = n - k + 1
    if len(xs) < needed:
        raise InsufficientArguments(
            f"B_{{{n},{k}}} needs {needed} arguments, got {len(xs)}"
        )
    total: object = 0
    for counts in _partition_vectors(n, k):
        coeff = factorial(n)
        for i, j in enumerate(counts, start=1):
            if j:
                coeff //= factorial(j) * factorial(i) ** j
        term: object = Fraction(coeff)
        for i, j in enumerate(counts, start=1):
            for _ in range(j):
                term = term * xs[i - 1]
        total = total + term
    return total


@lru_cache(maxsize=None)
def reciprocal_coefficient(m: int) -> MomentPoly:
    """``S_m``: the Bell-sum form of the reciprocal-series coefficients."""
    if m < 0:
        raise RingError("series index must be nonnegative")
    if m == 0:
        return MomentPoly.one()
    xs = [MomentPoly.variable(i).scale(factorial(i)) for i in range(1, m + 1)]
    total = MomentPoly.zero()
    for i in range(1, m + 1):
        value = bell(m, i, xs)
        if not isinstance(value, MomentPoly):
            continue
        sign = -1 if i % 2 else 1
        total = total + (value * MomentPoly.unit_power(-i)).scale(
            Fraction(sign * factorial(i))
        )
    return total


@lru_cache(maxsize=None)
def resolvent_coefficient(m: int) -> MomentPoly:
    """``R_m`` in moment variables."""
    if m < 0:
        raise RingError("series index must be nonnegative")
    if m == 0:
        return MomentPoly.constant(Fraction(1, 3))
    total = MomentPoly.zero()
    for k in range(1, m + 1):
        factor = MomentPoly.monomial(
            (0,) * k + (1,), Fraction(k, 3 + 2 * k)
        ) * MomentPoly.unit_power(-1)
        total = total + (factor * reciprocal_coefficient(m - k)).scale(
            Fraction(1, factorial(m - k))
        )
    return total.scale(Fraction(-2, 3))


@lru_cache(maxsize=None)
def resolvent_coefficient_t(m: int) -> MomentPoly:
    """``R_m`` in the rescaled display form whose natural unit is ``T0``.

    Equal to ``(2m-1)!! * convert(resolvent_coefficient(m), "rho", "t")``.
    Built here directly from its own Bell-sum display as an independent path;
    the equality with the converted form is exercised in the tests.
    """
    if m < 0:
        raise RingError("series index must be nonnegative")
    if m == 0:
        return MomentPoly.constant(Fraction(1, 3))
    xs = [
        MomentPoly.monomial(
            (-1,) + (0,) * (j - 1) + (1,),
            Fraction(factorial(j), double_factorial(2 * j + 1)),
        )
        for j in range(1, m + 1)
    ]
    total = MomentPoly.zero()
    for k in range(1, m + 1):
        outer = MomentPoly.monomial(
            (-1,) + (0,) * (k - 1) + (1,),
            Fraction(double_factorial(2 * m - 1) * k, double_factorial(2 * k + 3)),
        )
        inner = MomentPoly.zero()
        for l in range(m - k + 1):
            value = bell(m - k, l, xs)
            if isinstance(value, MomentPoly):
                inner = inner + value.scale(Fraction(factorial(l), factorial(m - k)))
            elif value:
                inner = inner + MomentPoly.constant(
                    Fraction(value) * Fraction(factorial(l), factorial(m - k))
                )
        total = total + outer * inner
    return total.scale(Fraction(2, 3))


def binomial(n: int, k: int) -> int:
    return comb(n, k)
