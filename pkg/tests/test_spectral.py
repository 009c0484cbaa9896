"""Tests for the numeric spectral pipeline.

Three independent oracles validate the Newton solve:

* plain bisection on an independently transcribed implicit function;
* the analytic first-order shift at small coupling with an O(lambda^4)
  remainder-scaling test;
* a 40-digit mpmath re-solve of the same equation feeding high-precision
  moment values.
"""

import json
import math
from math import sqrt

import mpmath
import pytest

from taulap import boundary
from taulap.spectral import (
    BranchViolation,
    InvalidModel,
    NoConvergence,
    OnCut,
    SpectralModel,
    SpectralSolution,
    solve,
)

MODELS = [
    SpectralModel(0, 0.3, 2.0, ((0.7, 1), (1.2, 2))),
    SpectralModel(2, 0.25, 2.0, ((0.9, 2), (1.6, 1))),
    SpectralModel(4, 0.3, 2.5, ((0.6, 1), (1.1, 2), (1.7, 1))),
    SpectralModel(6, 0.2, 3.0, ((0.8, 1), (1.3, 3))),
]


def reference_implicit(model: SpectralModel, c: float) -> float:
    """Independent transcription of the implicit shift equation."""
    z0 = sqrt(1 + c)
    lhs = (1 - z0) * ((1 + z0) if model.dimension == 6 else 1.0)
    total = 0.0
    for (energy, mult), w in zip(model.levels, model.weights):
        y = sqrt(4 * energy**2 + c)
        total += w / ((z0 + y) ** (model.dimension // 2) * y)
    return lhs - total / 2


def bisect_shift(model: SpectralModel, tol: float = 1e-14) -> float:
    wall = max(-1.0, -min(4 * e * e for e, _ in model.levels))
    lo, hi = wall + 1e-9, 0.0
    flo = reference_implicit(model, lo)
    fhi = reference_implicit(model, hi)
    assert flo * fhi <= 0, "oracle bracket must straddle the root"
    for _ in range(200):
        mid = (lo + hi) / 2
        fmid = reference_implicit(model, mid)
        if flo * fmid <= 0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
        if hi - lo < tol:
            break
    return (lo + hi) / 2


# ---------------------------------------------------------------------------
# model construction and parsing


def test_model_validation():
    with pytest.raises(InvalidModel):
        SpectralModel(3, 0.1, 1.0, ((1.0, 1),))
    with pytest.raises(InvalidModel):
        SpectralModel(2, -0.1, 1.0, ((1.0, 1),))
    with pytest.raises(InvalidModel):
        SpectralModel(2, 0.1, 0.0, ((1.0, 1),))
    with pytest.raises(InvalidModel):
        SpectralModel(2, 0.1, 1.0, ())
    with pytest.raises(InvalidModel):
        SpectralModel(2, 0.1, 1.0, ((0.0, 1),))
    with pytest.raises(InvalidModel):
        SpectralModel(2, 0.1, 1.0, ((1.0, 0),))


def test_from_dict_explicit_eigenvalues():
    model = SpectralModel.from_dict(
        {
            "dimension": 4,
            "lambda": 0.2,
            "volume": 2.0,
            "eigenvalues": [{"E": 0.5, "mult": 1}, {"E": 1.25, "mult": 3}],
        }
    )
    assert model.levels == ((0.5, 1), (1.25, 3))
    assert model.weights == (2 * 0.4**2 / 2.0, 2 * 0.4**2 * 3 / 2.0)


def test_from_dict_linear_generator():
    model = SpectralModel.from_dict(
        {
            "dimension": 4,
            "lambda": 0.1,
            "volume": 4.0,
            "generator": {"e": "linear", "cutoff_N": 3, "mu2": 1.5},
        }
    )
    spacing = 1 / (1.5 * 4.0 ** (2 / 4))
    for m, (energy, mult) in enumerate(model.levels):
        assert energy == pytest.approx(0.75 + m * spacing, abs=0, rel=1e-15)
        assert mult == m + 1  # binom(m+1, 1)
    assert len(model.levels) == 4


def test_generator_multiplicities_by_dimension():
    base = {"lambda": 0.1, "volume": 1.0, "generator": {"e": "linear", "cutoff_N": 4, "mu2": 1.0}}
    m2 = SpectralModel.from_dict({"dimension": 2, **base})
    assert [mult for _, mult in m2.levels] == [1, 1, 1, 1, 1]
    m6 = SpectralModel.from_dict({"dimension": 6, **base})
    assert [mult for _, mult in m6.levels] == [1, 3, 6, 10, 15]  # binom(m+2, 2)


def test_from_dict_errors():
    with pytest.raises(InvalidModel):
        SpectralModel.from_dict({"dimension": 4, "lambda": 0.1})
    with pytest.raises(InvalidModel):
        SpectralModel.from_dict(
            {"dimension": 4, "lambda": 0.1, "volume": 1.0, "eigenvalues": [{"E": 1.0}]}
        )
    with pytest.raises(InvalidModel):
        SpectralModel.from_dict(
            {
                "dimension": 0,
                "lambda": 0.1,
                "volume": 1.0,
                "generator": {"e": "linear", "cutoff_N": 2, "mu2": 1.0},
            }
        )
    with pytest.raises(InvalidModel):
        SpectralModel.from_dict(
            {
                "dimension": 4,
                "lambda": 0.1,
                "volume": 1.0,
                "generator": {"e": "quadratic", "cutoff_N": 2, "mu2": 1.0},
            }
        )
    with pytest.raises(InvalidModel):
        SpectralModel.from_json("{not json")


# ---------------------------------------------------------------------------
# solving


def test_zero_coupling_is_exact():
    model = SpectralModel(4, 0.0, 2.5, ((0.6, 1), (1.1, 2)))
    sol = solve(model)
    assert sol.shift == 0.0
    assert sol.wave_renorm == 1.0
    assert sol.mass_shift == 0.0
    assert sol.moment(0) == 1.0
    assert all(sol.moment(l) == 0.0 for l in range(1, 6))


def test_newton_matches_bisection():
    for model in MODELS:
        newton = solve(model).shift
        oracle = bisect_shift(model)
        assert abs(newton - oracle) < 1e-10, model


def test_solution_residual_tiny():
    for model in MODELS:
        sol = solve(model)
        assert abs(reference_implicit(model, sol.shift)) < 1e-11


def test_small_coupling_first_order():
    for dimension in (0, 2, 4, 6):
        errs = []
        for lam in (0.04, 0.02):
            model = SpectralModel(dimension, lam, 2.0, ((0.7, 1), (1.2, 2)))
            sol = solve(model)
            s0 = sum(
                w / ((1 + 2 * e) ** (dimension // 2) * 2 * e)
                for w, (e, _) in zip(model.weights, model.levels)
            ) / 2
            first = -2 * s0 / (2 if dimension == 6 else 1)
            errs.append(abs(sol.shift - first))
        assert errs[0] < 20 * 0.04**4  # fourth-order remainder, not second
        ratio = errs[0] / errs[1]
        assert 9 < ratio < 30  # halving lambda divides the remainder by ~16


def test_moments_match_high_precision_oracle():
    mpmath.mp.dps = 40
    for model in MODELS:
        half = model.dimension // 2

        def phi(c):
            z0 = mpmath.sqrt(1 + c)
            lhs = (1 - z0) * ((1 + z0) if model.dimension == 6 else mpmath.mpf(1))
            total = mpmath.mpf(0)
            for (energy, mult), w in zip(model.levels, model.weights):
                y = mpmath.sqrt(4 * mpmath.mpf(energy) ** 2 + c)
                total += mpmath.mpf(w) / ((z0 + y) ** half * y)
            return lhs - total / 2

        c_ref = mpmath.findroot(phi, mpmath.mpf(solve(model).shift))
        z0 = mpmath.sqrt(1 + c_ref)
        if model.dimension == 6:
            inv_sqrt_z = z0 + sum(
                mpmath.mpf(w) / ((z0 + mpmath.sqrt(4 * mpmath.mpf(e) ** 2 + c_ref)) ** 2
                                 * mpmath.sqrt(4 * mpmath.mpf(e) ** 2 + c_ref))
                for (e, _), w in zip(model.levels, model.weights)
            ) / 2
        else:
            inv_sqrt_z = mpmath.mpf(1)
        sol = solve(model)
        for l in range(0, 6):
            total = sum(
                mpmath.mpf(w) / mpmath.sqrt(4 * mpmath.mpf(e) ** 2 + c_ref) ** (3 + 2 * l)
                for (e, _), w in zip(model.levels, model.weights)
            )
            ref = (inv_sqrt_z if l == 0 else mpmath.mpf(0)) - total / 2
            assert abs(sol.moment(l) - float(ref)) < 1e-8


# ---------------------------------------------------------------------------
# edge conditions and derived quantities


def test_edge_conditions():
    for model in MODELS:
        sol = solve(model)
        if model.dimension >= 2:
            assert abs(sol.boundary_value() - 1.0) < 1e-10
        if model.dimension >= 4:
            assert abs(sol.boundary_slope() - 0.5) < 1e-10


def test_renormalisation_by_dimension():
    for model in MODELS:
        sol = solve(model)
        if model.dimension < 6:
            assert sol.wave_renorm == 1.0
        else:
            assert 0 < sol.wave_renorm < 1.5
        if model.dimension < 4:
            assert sol.mass_shift == 0.0


def test_moment_signs_weak_coupling():
    sol = solve(SpectralModel(4, 0.1, 2.0, ((0.7, 1), (1.2, 2))))
    assert 0 < sol.moment(0) < 1
    assert all(sol.moment(l) < 0 for l in range(1, 5))


# ---------------------------------------------------------------------------
# failure modes


def test_rootless_model_raises():
    with pytest.raises(NoConvergence):
        solve(SpectralModel(0, 5.0, 1.0, ((1.0, 1),)))


def test_branch_wall_press_raises():
    with pytest.raises(BranchViolation):
        solve(SpectralModel(0, 0.8, 1.0, ((1.0, 1),)))


def test_solution_construction_guards():
    model = SpectralModel(0, 0.1, 1.0, ((1.0, 1),))
    with pytest.raises(BranchViolation):
        SpectralSolution(model, -1.0)
    thin = SpectralModel(0, 0.1, 1.0, ((0.2, 1),))
    with pytest.raises(OnCut):
        SpectralSolution(thin, -0.17)


# ---------------------------------------------------------------------------
# correlator delegation


def test_planar_pair_value():
    model = SpectralModel(4, 0.3, 2.5, ((0.6, 1), (1.1, 2)))
    sol = solve(model)
    lam = model.coupling
    x, y = 1.3, 2.1
    expected = lam**2 * 4 / (x * y * (x + y) ** 2)
    assert sol.evaluate_correlator(0, [[x], [y]]) == pytest.approx(expected, rel=1e-12)


def test_one_boundary_value_from_moments():
    model = SpectralModel(4, 0.3, 2.5, ((0.6, 1), (1.1, 2), (1.7, 1)))
    sol = solve(model)
    lam, z = model.coupling, 1.7
    r0, r1 = sol.moment(0), sol.moment(1)
    expected = lam**4 * (2 * r1 / (r0**2 * z**3) - 2 / (r0 * z**5))
    assert sol.evaluate_correlator(1, [[z]]) == pytest.approx(expected, rel=1e-12)


def test_delegation_matches_boundary_module():
    model = SpectralModel(6, 0.2, 3.0, ((0.8, 1), (1.3, 3)))
    sol = solve(model)
    groups = [[1.1, 1.9], [2.6]]
    direct = boundary.evaluate_correlator(1, groups, model.coupling, sol.moments(8))
    assert sol.evaluate_correlator(1, groups) == pytest.approx(direct, rel=1e-13)
