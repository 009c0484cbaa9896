"""Exact computation of topological-recursion free energies and boundary correlators."""

from taulap.ring import (
    CoincidentPoints,
    LogProduct,
    LogSubstitution,
    LogTerm,
    MomentPoly,
    NonDivisible,
    NonUnitSubstitution,
    NotHomogeneous,
    Rational,
    RingError,
    UnknownVariable,
    ZLaurent,
    ZRational,
    convert,
    rational,
)

__all__ = [
    "CoincidentPoints",
    "LogProduct",
    "LogSubstitution",
    "LogTerm",
    "MomentPoly",
    "NonDivisible",
    "NonUnitSubstitution",
    "NotHomogeneous",
    "Rational",
    "RingError",
    "UnknownVariable",
    "ZLaurent",
    "ZRational",
    "convert",
    "rational",
]

__version__ = "0.1.0"
