"""Numeric spectral pipeline: implicit-equation solve and moment extraction.

A model is a finite spectrum ``(F_n, mult_n)`` with a coupling and a volume.
The planar solution is parametrised by a spectral shift ``c`` fixed by an
implicit equation; from the solved shift one reads off the wave-function
renormalisation, the mass shift and the moment sequence that feeds the exact
correlator machinery.  All solving happens in ordinary floats with an exact
analytic derivative inside a damped Newton iteration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from math import comb, sqrt
from typing import Mapping, Sequence

from taulap import boundary as _boundary


class SpectralError(ValueError):
    """Base class for spectral-pipeline failures."""


class InvalidModel(SpectralError):
    """The model description is malformed or out of range."""


class NoConvergence(SpectralError):
    """The Newton iteration did not reach the requested tolerance."""


class BranchViolation(SpectralError):
    """The iteration was pushed across the square-root branch point."""


class OnCut(SpectralError):
    """An eigenvalue pair collides with the spectral cut."""


VALID_DIMENSIONS = (0, 2, 4, 6)


@dataclass(frozen=True)
class SpectralModel:
    """Finite spectrum with coupling and volume."""

    dimension: int
    coupling: float
    volume: float
    levels: tuple[tuple[float, int], ...]

    def __post_init__(self) -> None:
        if self.dimension not in VALID_DIMENSIONS:
            raise InvalidModel(f"dimension must be one of {VALID_DIMENSIONS}")
        if not self.coupling >= 0:
            raise InvalidModel("coupling must be nonnegative")
        if not self.volume > 0:
            raise InvalidModel("volume must be positive")
        if not self.levels:
            raise InvalidModel("the spectrum must contain at least one level")
        for energy, mult in self.levels:
            if not energy > 0:
                raise InvalidModel("level energies must be positive")
            if mult < 1:
                raise InvalidModel("level multiplicities must be positive integers")

    @property
    def weights(self) -> tuple[float, ...]:
        """Per-level weights ``2 (2 lambda)^2 mult / V``."""
        lam = self.coupling
        return tuple(2 * (2 * lam) ** 2 * mult / self.volume for _, mult in self.levels)

    @classmethod
    def from_dict(cls, data: Mapping) -> "SpectralModel":
        try:
            dimension = int(data["dimension"])
            coupling = float(data["lambda"])
            volume = float(data["volume"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidModel(f"bad model header: {exc}") from exc
        if "eigenvalues" in data:
            levels = []
            for entry in data["eigenvalues"]:
                try:
                    levels.append((float(entry["E"]), int(entry["mult"])))
                except (KeyError, TypeError, ValueError) as exc:
                    raise InvalidModel(f"bad eigenvalue entry {entry!r}") from exc
            return cls(dimension, coupling, volume, tuple(levels))
        if "generator" in data:
            gen = data["generator"]
            if gen.get("e") != "linear":
                raise InvalidModel("only the linear spectrum generator is supported")
            if dimension not in (2, 4, 6):
                raise InvalidModel("the linear generator needs dimension 2, 4 or 6")
            try:
                cutoff = int(gen["cutoff_N"])
                mu2 = float(gen["mu2"])
            except (KeyError, TypeError, ValueError) as exc:
                raise InvalidModel(f"bad generator block: {exc}") from exc
            if cutoff < 0 or not mu2 > 0:
                raise InvalidModel("generator needs cutoff_N >= 0 and mu2 > 0")
            half = dimension // 2
            levels = tuple(
                (
                    mu2 / 2 + m / (mu2 * volume ** (2 / dimension)),
                    comb(m + half - 1, half - 1),
                )
                for m in range(cutoff + 1)
            )
            return cls(dimension, coupling, volume, levels)
        raise InvalidModel("model needs either 'eigenvalues' or 'generator'")

    @classmethod
    def from_json(cls, text: str) -> "SpectralModel":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidModel(f"not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def _edge(model: SpectralModel, c: float) -> float:
    return sqrt(1 + c)


def _cut_positions(model: SpectralModel, c: float) -> list[float]:
    return [sqrt(4 * e * e + c) for e, _ in model.levels]


def _spectral_sum(model: SpectralModel, c: float, edge_power: int) -> float:
    """``(1/2) sum_n w_n / ((z0 + y_n)**edge_power * y_n)``."""
    z0 = _edge(model, c)
    total = 0.0
    for w, y in zip(model.weights, _cut_positions(model, c)):
        total += w / ((z0 + y) ** edge_power * y)
    return total / 2


def _implicit(model: SpectralModel, c: float) -> float:
    z0 = _edge(model, c)
    lhs = (1 - z0) * ((1 + z0) if model.dimension == 6 else 1.0)
    return lhs - _spectral_sum(model, c, model.dimension // 2)


def _implicit_derivative(model: SpectralModel, c: float) -> float:
    z0 = _edge(model, c)
    dz0 = 1 / (2 * z0)
    if model.dimension == 6:
        dlhs = -1.0
    else:
        dlhs = -dz0
    half = model.dimension // 2
    drhs = 0.0
    for w, y in zip(model.weights, _cut_positions(model, c)):
        dy = 1 / (2 * y)
        base = (z0 + y) ** half
        drhs += w * (
            -half * (dz0 + dy) / ((z0 + y) ** (half + 1) * y) - dy / (base * y * y)
        )
    return dlhs - drhs / 2


@dataclass(frozen=True)
class SpectralSolution:
    """Solved planar data of a spectral model."""

    model: SpectralModel
    shift: float

    def __post_init__(self) -> None:
        if not self.shift + 1 > 0:
            raise BranchViolation("shift at or below the branch point of the edge")
        floor_cut = min(4 * e * e for e, _ in self.model.levels)
        if not self.shift + floor_cut > 0:
            raise OnCut("shift puts an eigenvalue pair on the spectral cut")

    @property
    def edge(self) -> float:
        return _edge(self.model, self.shift)

    @property
    def wave_renorm(self) -> float:
        if self.model.dimension < 6:
            return 1.0
        inv_sqrt = self.edge + _spectral_sum(self.model, self.shift, 2)
        return inv_sqrt**-2

    @property
    def mass_shift(self) -> float:
        """The combination ``lambda * nu`` entering the planar resolvent."""
        if self.model.dimension < 4:
            return 0.0
        z0 = self.edge
        s1 = _spectral_sum(self.model, self.shift, 1)
        return z0 / sqrt(self.wave_renorm) - 1 + s1

    def moment(self, index: int) -> float:
        if index < 0:
            raise InvalidModel("moment index must be nonnegative")
        z0 = _edge(self.model, self.shift)
        total = 0.0
        for w, y in zip(self.model.weights, _cut_positions(self.model, self.shift)):
            total += w / y ** (3 + 2 * index)
        base = 1 / sqrt(self.wave_renorm) if index == 0 else 0.0
        return base - total / 2

    def moments(self, lmax: int) -> dict[int, float]:
        return {l: self.moment(l) for l in range(lmax + 1)}

    def resolvent(self, z: float) -> float:
        """Planar resolvent in the shifted variable."""
        z0 = self.edge
        total = 0.0
        for w, y in zip(self.model.weights, _cut_positions(self.model, self.shift)):
            total += w / ((z + y) * y)
        return z / sqrt(self.wave_renorm) - self.mass_shift + total / 2

    def resolvent_derivative(self, z: float) -> float:
        total = 0.0
        for w, y in zip(self.model.weights, _cut_positions(self.model, self.shift)):
            total += w / ((z + y) ** 2 * y)
        return 1 / sqrt(self.wave_renorm) - total / 2

    def boundary_value(self) -> float:
        """Planar two-point function at the spectral edge (normalised to 1)."""
        return self.resolvent(self.edge)

    def boundary_slope(self) -> float:
        """Edge slope in the physical variable (normalised to 1/2)."""
        return self.resolvent_derivative(self.edge) / (2 * self.edge)

    def evaluate_correlator(
        self, g: int, groups: Sequence[Sequence[float]], lmax: int | None = None
    ) -> float:
        if lmax is None:
            stored = _boundary.correlator(g, len(groups))
            laurent = stored if not hasattr(stored, "num") else stored.num
            lmax = max(laurent.moment_support(), default=0)
        moments = self.moments(lmax)
        return _boundary.evaluate_correlator(g, groups, self.model.coupling, moments)


def solve(model: SpectralModel, tol: float = 1e-12, max_iter: int = 200) -> SpectralSolution:
    """Damped Newton solve of the implicit shift equation, starting at zero.

    Newton candidates that overshoot a square-root wall are damped to the
    midpoint between the current iterate and the wall; an iteration that keeps
    pressing into a wall therefore converges onto it geometrically and is
    reported as the corresponding domain error instead of a generic failure.
    """
    if model.coupling == 0:
        return SpectralSolution(model, 0.0)
    floor_cut = min(4 * e * e for e, _ in model.levels)
    wall = max(-1.0, -floor_cut)
    wall_error: type[SpectralError] = OnCut if -floor_cut >= -1 else BranchViolation
    wall_margin = 1e-11 * max(1.0, abs(wall))
    c = 0.0
    value = _implicit(model, c)
    for _ in range(max_iter):
        if abs(value) <= tol:
            return SpectralSolution(model, c)
        slope = _implicit_derivative(model, c)
        if slope == 0 or not math.isfinite(slope):
            raise NoConvergence("flat or invalid derivative in Newton step")
        step = -value / slope
        candidate = c + step
        if candidate <= wall:
            candidate = (c + wall) / 2
            if candidate - wall <= wall_margin:
                if wall_error is OnCut:
                    raise OnCut("iterates pinned at the spectral cut")
                raise BranchViolation("iterates pinned at the branch point of the edge")
        step = candidate - c
        c = candidate
        value = _implicit(model, c)
        if abs(step) <= tol * max(1.0, abs(c)) and abs(value) <= sqrt(tol):
            return SpectralSolution(model, c)
    raise NoConvergence(f"no root after {max_iter} Newton steps (|residual|={abs(value):.3e})")
