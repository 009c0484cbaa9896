"""Boundary correlators built from the free energies by creation operators.

A correlator with ``B`` boundaries is stored as a Laurent object in
``z_1 .. z_B`` with moment-polynomial coefficients (a rational object with
``(z_i + z_j)`` poles for the planar two-boundary case).  Chains are built by
the boundary creation operator and validated by its adjoint pair:

* ``create``      -- appends a boundary variable (the adjoint raising map);
* ``annihilate``  -- removes the last boundary variable (lowering map);
* ``number_operator`` -- their composition; correlators are eigenvectors
  with eigenvalue ``2g + B - 2``;
* ``kernel_op``   -- the multiplication-side kernel entering the loop
  equations.

Stored objects are unit-normalized: the physical correlator carries an
overall coupling power ``lambda ** lambda_exponent(g, B)`` on top of the
stored one, and boundary chains absorb fixed powers of two recorded in
``correlator`` (``2^{4g}`` into the one-boundary object, ``2^2`` for the
first created boundary, ``2^3`` for each further one).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Mapping, Sequence

from taulap.laplacian import GenusOutOfRange, genus_one, stable_partition
from taulap.ring import (
    CoincidentPoints,
    MomentPoly,
    RingError,
    ZLaurent,
    ZRational,
)

F = Fraction


class UnsupportedExponent(RingError):
    """The kernel operator is defined on odd negative powers only."""


def lambda_exponent(g: int, boundaries: int) -> int:
    """Coupling power relating the stored correlator to the physical one."""
    if g < 0 or boundaries < 1:
        raise GenusOutOfRange(f"invalid correlator labels ({g}, {boundaries})")
    return 4 * g + 3 * boundaries - 4 + (1 if boundaries == 1 else 0)


def generic_moments(count: int = 12) -> dict[int, Fraction]:
    """Fixed generic rational moment values free of accidental degeneracies."""
    nums = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    dens = (7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)
    if count > len(nums):
        raise RingError(f"generic moments available up to index {len(nums)}")
    out = {0: F(5, 3)}
    for l in range(1, count + 1):
        sign = -1 if l % 2 else 1
        out[l] = F(sign * nums[l - 1], dens[l - 1])
    return out


# ---------------------------------------------------------------------------
# operators


def _moment_indices(obj: MomentPoly | ZLaurent | ZRational) -> range:
    if isinstance(obj, MomentPoly):
        support = obj.moment_support()
    elif isinstance(obj, ZLaurent):
        support = obj.moment_support()
    else:
        support = obj.num.moment_support()
    return range(0, (max(support) if support else -1) + 1)


def _ratio_coeff(l: int) -> MomentPoly:
    """``r_{l+1} / r_0`` as a moment polynomial."""
    return MomentPoly.monomial((-1,) + (0,) * l + (1,))


def create(obj: MomentPoly | ZLaurent | ZRational) -> ZLaurent | ZRational:
    """Boundary creation: one more variable, appended as the last slot."""
    if isinstance(obj, MomentPoly):
        acc: dict[tuple[int, ...], MomentPoly] = {}

        def _add(exp: int, poly: MomentPoly) -> None:
            prev = acc.get((exp,))
            total = poly if prev is None else prev + poly
            if total.is_zero:
                acc.pop((exp,), None)
            else:
                acc[(exp,)] = total

        for l in _moment_indices(obj):
            dp = obj.partial(l)
            if dp.is_zero:
                continue
            _add(-3, dp * _ratio_coeff(l).scale(-(3 + 2 * l)))
            _add(-5 - 2 * l, dp.scale(3 + 2 * l))
        out = ZLaurent(1)
        out.terms = acc
        return out
    n = obj.nvars
    positions = list(range(n))
    if isinstance(obj, ZLaurent):
        total = ZLaurent.zero(n + 1)
        for l in _moment_indices(obj):
            d = obj.partial_moment(l)
            if d.is_zero:
                continue
            wide = d.embed(positions, n + 1)
            total = total + wide.scale(_ratio_coeff(l).scale(-(3 + 2 * l))).shift(n, -3)
            total = total + wide.scale(3 + 2 * l).shift(n, -5 - 2 * l)
        inv_unit = MomentPoly.unit_power(-1)
        for i in range(n):
            dz = obj.dz(i)
            if dz.is_zero:
                continue
            total = total + dz.embed(positions, n + 1).shift(i, -1).shift(n, -3).scale(inv_unit)
        return total
    # rational input
    total = ZRational(ZLaurent.zero(n + 1))
    for l in _moment_indices(obj):
        d = obj.partial_moment(l)
        if d.num.is_zero:
            continue
        wide = d.embed(positions, n + 1)
        total = total + wide.scale(_ratio_coeff(l).scale(-(3 + 2 * l))).shift(n, -3)
        total = total + wide.scale(3 + 2 * l).shift(n, -5 - 2 * l)
    inv_unit = MomentPoly.unit_power(-1)
    for i in range(n):
        dz = obj.dz(i)
        if dz.num.is_zero:
            continue
        total = total + dz.embed(positions, n + 1).shift(i, -1).shift(n, -3).scale(inv_unit)
    return total.reduce()


def annihilate(obj: ZLaurent) -> ZLaurent | MomentPoly:
    """Boundary removal acting on the last variable.

    Picks out the ``z**(-5-2l)`` coefficients; ``z**-3`` never contributes.
    """
    if not isinstance(obj, ZLaurent):
        raise RingError("boundary removal is defined on Laurent correlators")
    var = obj.nvars - 1
    if obj.nvars == 1:
        out_poly = MomentPoly.zero()
        for key, coeff in obj.terms.items():
            e = key[0]
            if e <= -5 and e % 2:
                l = (-e - 5) // 2
                out_poly = out_poly + coeff * MomentPoly.variable(l).scale(F(-1, 3 + 2 * l))
        return out_poly
    out = ZLaurent(obj.nvars - 1)
    terms: dict[tuple[int, ...], MomentPoly] = {}
    for key, coeff in obj.terms.items():
        e = key[var]
        if e > -5 or e % 2 == 0:
            continue
        l = (-e - 5) // 2
        rest = key[:var]
        piece = coeff * MomentPoly.variable(l).scale(F(-1, 3 + 2 * l))
        prev = terms.get(rest)
        total = piece if prev is None else prev + piece
        if total.is_zero:
            terms.pop(rest, None)
        else:
            terms[rest] = total
    out.terms = terms
    return out


def number_operator(p: MomentPoly) -> MomentPoly:
    """``-sum_l r_l d/dr_l``: eigenvalue ``-(e0 + sum e_k)`` per monomial."""
    out = MomentPoly.__new__(MomentPoly)
    out.terms = {}
    out.log_coeff = F(0)
    for key, coeff in p.terms.items():
        degree = -sum(key)
        if degree:
            out.terms[key] = coeff * degree
    if p.log_coeff:
        const = out.terms.get((), F(0)) - p.log_coeff
        if const:
            out.terms[()] = const
        else:
            out.terms.pop((), None)
    return out


def number_operator_z(obj: ZLaurent) -> ZLaurent:
    return obj.map_coefficients(number_operator)


def kernel_op(obj: ZLaurent, var: int = 0) -> ZLaurent:
    """Kernel operator in one boundary variable.

    ``z**-(3+2n)`` maps to ``sum_{k=0}^{n} r_k z**-(2n+2-2k)``; ``z**-1`` maps
    to ``1``; any other exponent is an error.
    """
    out = ZLaurent(obj.nvars)
    terms: dict[tuple[int, ...], MomentPoly] = {}

    def _add(key: tuple[int, ...], poly: MomentPoly) -> None:
        prev = terms.get(key)
        total = poly if prev is None else prev + poly
        if total.is_zero:
            terms.pop(key, None)
        else:
            terms[key] = total

    for key, coeff in obj.terms.items():
        e = key[var]
        if e == -1:
            _add(key[:var] + (0,) + key[var + 1:], coeff)
            continue
        if e > -3 or e % 2 == 0:
            raise UnsupportedExponent(
                f"kernel operator undefined on exponent {e} of variable {var}"
            )
        n = (-e - 3) // 2
        for k in range(n + 1):
            _add(
                key[:var] + (-(2 * n + 2 - 2 * k),) + key[var + 1:],
                coeff * MomentPoly.variable(k),
            )
    out.terms = terms
    return out


# ---------------------------------------------------------------------------
# correlator chains


def planar_pair() -> ZRational:
    """The planar two-boundary object ``4 / (z1 z2 (z1+z2)^2)`` (stored units)."""
    return ZRational(ZLaurent(2, {(-1, -1): 4}), {(0, 1, 1): 2})


def _stored_free_energy(g: int) -> MomentPoly:
    if g == 1:
        return genus_one()
    return stable_partition("rho").f(g)


@lru_cache(maxsize=None)
def correlator(g: int, boundaries: int) -> ZLaurent | ZRational:
    """Stored correlator with ``g`` handles and ``boundaries`` boundaries."""
    if g < 0 or boundaries < 1 or (g == 0 and boundaries == 1):
        raise GenusOutOfRange(f"no stable correlator with labels ({g}, {boundaries})")
    if g == 0 and boundaries == 2:
        return planar_pair()
    if boundaries == 1:
        return create(_stored_free_energy(g)).scale(2 ** (4 * g))
    factor = 4 if boundaries == 2 else 8
    result = create(correlator(g, boundaries - 1)).scale(factor)
    return result


def diagonal(g: int) -> ZLaurent | ZRational:
    """Two-boundary correlator at coincident points, one variable left."""
    pair = correlator(g, 2)
    return pair.identify(0, 1)


# ---------------------------------------------------------------------------
# evaluation


def _check_group(points: Sequence[object]) -> None:
    squares = [z * z for z in points]
    for i in range(len(squares)):
        for j in range(i + 1, len(squares)):
            if squares[i] == squares[j]:
                raise CoincidentPoints(
                    "points within one boundary group must have distinct squares"
                )


def n_point_core(
    g: int,
    groups: Sequence[Sequence[object]],
    moments: Mapping[int, object],
) -> object:
    """Grouped n-point evaluation of the stored correlator (unit coupling)."""
    B = len(groups)
    stored = correlator(g, B)
    for grp in groups:
        if not grp:
            raise RingError("every boundary group needs at least one point")
        _check_group(grp)
    total: object = None
    for choice in product(*[range(len(grp)) for grp in groups]):
        pts = [groups[b][choice[b]] for b in range(B)]
        weight: object = F(1)
        for b, grp in enumerate(groups):
            zk = grp[choice[b]]
            for li, zl in enumerate(grp):
                if li != choice[b]:
                    weight = weight * 2 / (zk * zk - zl * zl)
        part = stored.evaluate(pts, moments) * weight
        total = part if total is None else total + part
    return total


def evaluate_correlator(
    g: int,
    groups: Sequence[Sequence[object]],
    lam: object = F(1, 2),
    moments: Mapping[int, object] | None = None,
) -> object:
    """Physical grouped correlator: coupling bookkeeping times the stored core."""
    if moments is None:
        moments = generic_moments()
    B = len(groups)
    n_total = sum(len(grp) for grp in groups)
    core = n_point_core(g, groups, moments)
    return lam ** lambda_exponent(g, B) * (2 * lam) ** (n_total - B) * core
