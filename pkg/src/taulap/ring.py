"""Exact sparse arithmetic for moment polynomials and boundary-variable Laurent objects.

The coefficient ring is generated by one invertible unit (index 0) and
countably many ordinary moment variables (index 1, 2, ...).  A monomial is a
dense exponent tuple ``(e0, e1, e2, ...)`` with trailing zeros trimmed;
``e0`` may be any integer because the unit is invertible, while ``e_k >= 0``
for ``k >= 1``.  A polynomial may additionally carry a single ``log(unit)``
term with a rational coefficient; that is all the genus-one free energy needs.

Four display conventions for the same ring are supported:

* ``rho``    -- unit ``r0``, variables ``r1, r2, ...``;
* ``t``      -- unit ``T0``, variables ``t2, t3, ...`` with
  ``r_l = -t_{l+1} / (2l+1)!!``;
* ``iz``     -- unit ``(1-I1)``, variables ``I2, I3, ...``, same scaling
  as ``t``;
* ``eynard`` -- unit ``(2-t3)``, odd-indexed variables ``t5, t7, ...`` with
  ``r_l = -t_{2l+3}``.

Converting a polynomial between conventions is a pure rescaling of
coefficients; the exponent keys are shared by all conventions.

Boundary-variable objects are Laurent polynomials in ``z_1 .. z_B`` whose
coefficients are moment polynomials (:class:`ZLaurent`), and rational
functions whose denominators are products of ``(z_i + z_j)`` or
``(z_i - z_j)`` factors (:class:`ZRational`).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import zip_longest
from math import factorial
from typing import Callable, Iterable, Mapping, Sequence


class RingError(ValueError):
    """Base class for arithmetic domain errors raised by this package."""


class NonDivisible(RingError):
    """Exact division was requested but the divisor does not divide."""


class LogProduct(RingError):
    """A product would require powers or products of log terms."""


class LogTerm(RingError):
    """The operation does not support polynomials with a log term."""


class NotHomogeneous(RingError):
    """A single weight was requested from a mixed-weight polynomial."""


class NonUnitSubstitution(RingError):
    """The unit variable was bound to a non-invertible value."""


class LogSubstitution(RingError):
    """A log term cannot be evaluated at this unit value."""


class UnknownVariable(RingError):
    """Evaluation is missing a value for a variable that occurs."""


class CoincidentPoints(RingError):
    """Evaluation points collide where distinct values are required."""


Rational = Fraction
Key = tuple[int, ...]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def rational(value: object, denominator: object | None = None) -> Fraction:
    """Build an exact rational; accepts ints, strings like ``"7/240"``, Fractions."""
    if denominator is None:
        return Fraction(value)  # type: ignore[arg-type]
    return Fraction(value, denominator)  # type: ignore[arg-type]


def format_rational(value: object) -> str:
    """Render an exact rational as ``"p/q"`` (or ``"p"`` when integral)."""
    return str(Fraction(value))  # type: ignore[arg-type]


def double_factorial(n: int) -> int:
    """Odd double factorial ``n!!`` for odd ``n >= -1``, with ``(-1)!! = 1``."""
    if n < -1 or n % 2 == 0:
        raise ValueError(f"odd double factorial needs an odd n >= -1, got {n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _trim(key: Iterable[int]) -> Key:
    key = tuple(key)
    end = len(key)
    while end and key[end - 1] == 0:
        end -= 1
    return key[:end]


def _addkey(a: Key, b: Key) -> Key:
    if not a:
        return b
    if not b:
        return a
    return _trim(x + y for x, y in zip_longest(a, b, fillvalue=0))


def monomial_weight(key: Key) -> int:
    """Weight of an exponent key: ``sum_{k>=1} k * e_k`` (the unit counts zero)."""
    return sum(l * e for l, e in enumerate(key) if l)


class MomentPoly:
    """Sparse exact polynomial in the unit and the moment variables."""

    __slots__ = ("terms", "log_coeff")

    def __init__(
        self,
        terms: Mapping[Key, object] | None = None,
        log_coeff: object = 0,
    ) -> None:
        clean: dict[Key, Fraction] = {}
        if terms:
            for raw_key, raw_coeff in terms.items():
                coeff = raw_coeff if type(raw_coeff) is Fraction else Fraction(raw_coeff)  # type: ignore[arg-type]
                if not coeff:
                    continue
                key = _trim(raw_key)
                if any(e < 0 for e in key[1:]):
                    raise RingError(f"moment exponents must be nonnegative: {key}")
                prev = clean.get(key)
                if prev is None:
                    clean[key] = coeff
                else:
                    total = prev + coeff
                    if total:
                        clean[key] = total
                    else:
                        del clean[key]
        self.terms = clean
        self.log_coeff = log_coeff if type(log_coeff) is Fraction else Fraction(log_coeff)  # type: ignore[arg-type]

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "MomentPoly":
        return cls()

    @classmethod
    def one(cls) -> "MomentPoly":
        return cls({(): 1})

    @classmethod
    def constant(cls, value: object) -> "MomentPoly":
        return cls({(): value})

    @classmethod
    def monomial(cls, key: Iterable[int], coeff: object = 1) -> "MomentPoly":
        return cls({tuple(key): coeff})

    @classmethod
    def variable(cls, index: int, power: int = 1) -> "MomentPoly":
        if index < 0:
            raise RingError(f"variable index must be >= 0, got {index}")
        if index == 0:
            return cls({(power,): 1})
        return cls({(0,) * index + (power,): 1})

    @classmethod
    def unit_power(cls, power: int) -> "MomentPoly":
        """The unit raised to any (possibly negative) integer power."""
        return cls({(power,): 1})

    @classmethod
    def log_unit(cls, coeff: object = 1) -> "MomentPoly":
        """``coeff * log(unit)``."""
        return cls(None, log_coeff=coeff)

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms and not self.log_coeff

    @property
    def is_constant(self) -> bool:
        return not self.log_coeff and all(not k for k in self.terms)

    def constant_value(self) -> Fraction:
        if self.log_coeff:
            raise LogTerm("a log term is not a constant")
        extra = [k for k in self.terms if k]
        if extra:
            raise RingError(f"not a constant polynomial: {self!r}")
        return self.terms.get((), _ZERO)

    def weights(self) -> set[int]:
        out = {monomial_weight(k) for k in self.terms}
        if self.log_coeff:
            out.add(0)
        return out

    def weight(self) -> int:
        """The common weight of all terms; ``NotHomogeneous`` if they differ."""
        ws = self.weights()
        if not ws:
            return 0
        if len(ws) > 1:
            raise NotHomogeneous(f"mixed weights {sorted(ws)}")
        return ws.pop()

    def moment_support(self) -> set[int]:
        """Variable indices on which the polynomial genuinely depends."""
        out: set[int] = set()
        for key in self.terms:
            for l, e in enumerate(key):
                if e:
                    out.add(l)
        if self.log_coeff:
            out.add(0)
        return out

    def max_index(self) -> int:
        return max((len(k) - 1 for k in self.terms if k), default=0)

    # -- arithmetic --------------------------------------------------------

    def __bool__(self) -> bool:
        return not self.is_zero

    def __eq__(self, other: object) -> bool:
        if isinstance(other, MomentPoly):
            return self.terms == other.terms and self.log_coeff == other.log_coeff
        if isinstance(other, (int, Fraction)):
            if self.log_coeff:
                return False
            return self.terms == ({(): Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        return hash((frozenset(self.terms.items()), self.log_coeff))

    def __neg__(self) -> "MomentPoly":
        out = MomentPoly.__new__(MomentPoly)
        out.terms = {k: -c for k, c in self.terms.items()}
        out.log_coeff = -self.log_coeff
        return out

    def __add__(self, other: object) -> "MomentPoly":
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            prev = terms.get(key)
            if prev is None:
                terms[key] = coeff
            else:
                total = prev + coeff
                if total:
                    terms[key] = total
                else:
                    del terms[key]
        out = MomentPoly.__new__(MomentPoly)
        out.terms = terms
        out.log_coeff = self.log_coeff + other.log_coeff
        return out

    __radd__ = __add__

    def __sub__(self, other: object) -> "MomentPoly":
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: object) -> "MomentPoly":
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, factor: object) -> "MomentPoly":
        factor = factor if type(factor) is Fraction else Fraction(factor)  # type: ignore[arg-type]
        if not factor:
            return MomentPoly()
        out = MomentPoly.__new__(MomentPoly)
        out.terms = {k: c * factor for k, c in self.terms.items()}
        out.log_coeff = self.log_coeff * factor
        return out

    def __mul__(self, other: object) -> "MomentPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, MomentPoly):
            return NotImplemented
        if other.is_constant:
            return self.scale(other.terms.get((), _ZERO))
        if self.is_constant:
            return other.scale(self.terms.get((), _ZERO))
        if self.log_coeff or other.log_coeff:
            raise LogProduct("cannot multiply log terms by non-constant polynomials")
        acc: dict[Key, Fraction] = {}
        mul_into(acc, self, other)
        out = MomentPoly.__new__(MomentPoly)
        out.terms = {k: c for k, c in acc.items() if c}
        out.log_coeff = _ZERO
        return out

    def __rmul__(self, other: object) -> "MomentPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, power: int) -> "MomentPoly":
        if not isinstance(power, int) or power < 0:
            raise RingError("polynomial powers must be nonnegative integers")
        if power == 0:
            return MomentPoly.one()
        if self.log_coeff and power > 1:
            raise LogProduct("cannot square a log term")
        out = self
        for _ in range(power - 1):
            out = out * self
        return out

    def __truediv__(self, other: object) -> "MomentPoly":
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division of polynomial by zero")
            return self.scale(Fraction(1, 1) / Fraction(other))
        if not isinstance(other, MomentPoly):
            return NotImplemented
        if other.is_constant:
            return self / other.constant_value()
        if other.log_coeff:
            raise LogTerm("cannot divide by a log term")
        if len(other.terms) != 1:
            raise NonDivisible("exact division is defined for monomial divisors only")
        if self.log_coeff:
            raise LogTerm("cannot divide a log term by a non-constant monomial")
        (dkey, dcoeff), = other.terms.items()
        neg = tuple(-e for e in dkey)
        terms: dict[Key, Fraction] = {}
        for key, coeff in self.terms.items():
            new = _addkey(key, neg)
            if any(e < 0 for e in new[1:]):
                raise NonDivisible(f"{key} is not divisible by {dkey}")
            terms[new] = coeff / dcoeff
        out = MomentPoly.__new__(MomentPoly)
        out.terms = terms
        out.log_coeff = _ZERO
        return out

    # -- calculus ----------------------------------------------------------

    def partial(self, index: int) -> "MomentPoly":
        """Partial derivative with respect to variable ``index`` (0 = unit)."""
        terms: dict[Key, Fraction] = {}
        for key, coeff in self.terms.items():
            e = key[index] if index < len(key) else 0
            if not e:
                continue
            if index == 0:
                new = (e - 1,) + key[1:]
            else:
                new = key[:index] + (e - 1,) + key[index + 1:]
            new = _trim(new)
            prev = terms.get(new)
            val = coeff * e
            terms[new] = val if prev is None else prev + val
        out = MomentPoly.__new__(MomentPoly)
        out.terms = {k: c for k, c in terms.items() if c}
        out.log_coeff = _ZERO
        if index == 0 and self.log_coeff:
            key = (-1,)
            out.terms[key] = out.terms.get(key, _ZERO) + self.log_coeff
            if not out.terms[key]:
                del out.terms[key]
        return out

    def substitute(self, values: Mapping[int, object]) -> object:
        """Evaluate at numeric moment values (index -> value).

        Values may be exact rationals or floats; the unit (index 0) must be
        nonzero whenever it occurs with a negative power, and a log term is
        only evaluable when the unit is bound to exactly 1.
        """
        total: object = None
        for key, coeff in self.terms.items():
            part: object = coeff
            for l, e in enumerate(key):
                if not e:
                    continue
                if l not in values:
                    raise UnknownVariable(f"no value bound for variable index {l}")
                base = values[l]
                if l == 0 and e < 0 and not base:
                    raise NonUnitSubstitution("the unit must be bound to a nonzero value")
                part = part * base**e
            total = part if total is None else total + part
        if self.log_coeff:
            if 0 not in values:
                raise UnknownVariable("no value bound for the unit")
            if values[0] != 1:
                raise LogSubstitution("log terms evaluate only at unit value 1")
        if total is None:
            return _ZERO
        return total

    # -- display -----------------------------------------------------------

    def __str__(self) -> str:
        return render_str(self, "rho")

    def __repr__(self) -> str:
        return f"MomentPoly({render_str(self, 'rho')})"


def _as_poly(value: object) -> MomentPoly | None:
    if isinstance(value, MomentPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return MomentPoly.constant(value)
    return None


def mul_into(
    acc: dict[Key, Fraction],
    a: MomentPoly,
    b: MomentPoly,
    scalar: Fraction = _ONE,
) -> None:
    """Accumulate ``scalar * a * b`` into a raw terms dict (log-free operands)."""
    if a.log_coeff or b.log_coeff:
        raise LogProduct("cannot multiply log terms by non-constant polynomials")
    b_items = list(b.terms.items())
    for ka, ca in a.terms.items():
        cs = ca * scalar
        for kb, cb in b_items:
            k = _addkey(ka, kb)
            prev = acc.get(k)
            val = cs * cb
            acc[k] = val if prev is None else prev + val


def finalize(acc: dict[Key, Fraction]) -> MomentPoly:
    out = MomentPoly.__new__(MomentPoly)
    out.terms = {k: c for k, c in acc.items() if c}
    out.log_coeff = _ZERO
    return out


# ---------------------------------------------------------------------------
# display conventions


CONVENTIONS = ("rho", "t", "iz", "eynard")

_UNIT_SYMBOL = {"rho": "r0", "t": "T0", "iz": "(1-I1)", "eynard": "(2-t3)"}


def _check_convention(convention: str) -> None:
    if convention not in CONVENTIONS:
        raise RingError(f"unknown convention {convention!r}; choose from {CONVENTIONS}")


def convention_scale(convention: str, index: int) -> Fraction:
    """Scale ``s_l`` with ``r_l = s_l * v_l`` for the convention's variable ``v_l``."""
    _check_convention(convention)
    if index < 1:
        raise RingError("convention scales apply to variable indices >= 1")
    if convention == "rho":
        return _ONE
    if convention == "eynard":
        return Fraction(-1)
    return Fraction(-1, double_factorial(2 * index + 1))


def variable_symbol(convention: str, index: int) -> str:
    _check_convention(convention)
    if index < 1:
        raise RingError("variable symbols apply to indices >= 1")
    if convention == "rho":
        return f"r{index}"
    if convention == "t":
        return f"t{index + 1}"
    if convention == "iz":
        return f"I{index + 1}"
    return f"t{2 * index + 3}"


def unit_symbol(convention: str) -> str:
    _check_convention(convention)
    return _UNIT_SYMBOL[convention]


def convert(poly: MomentPoly, src: str, dst: str) -> MomentPoly:
    """Re-express a polynomial's coefficients from one convention to another."""
    _check_convention(src)
    _check_convention(dst)
    if src == dst:
        return poly
    terms: dict[Key, Fraction] = {}
    for key, coeff in poly.terms.items():
        factor = _ONE
        for l, e in enumerate(key):
            if l and e:
                factor *= (convention_scale(dst, l) / convention_scale(src, l)) ** e
        terms[key] = coeff * factor
    out = MomentPoly.__new__(MomentPoly)
    out.terms = terms
    out.log_coeff = poly.log_coeff
    return out


def _padded_sort_key(key: Key, width: int) -> tuple:
    padded = key + (0,) * (width - len(key))
    return (monomial_weight(key), padded)


def ordered_terms(poly: MomentPoly) -> list[tuple[Key, Fraction]]:
    """Terms in canonical order: ascending weight, then lexicographic exponents."""
    width = max((len(k) for k in poly.terms), default=0)
    return sorted(poly.terms.items(), key=lambda kv: _padded_sort_key(kv[0], width))


def render_monomial(key: Key, convention: str = "rho") -> str:
    _check_convention(convention)
    key = _trim(key)
    e0 = key[0] if key else 0
    var_parts = [
        variable_symbol(convention, l) + (f"^{e}" if e != 1 else "")
        for l, e in enumerate(key)
        if l and e
    ]
    unit = unit_symbol(convention)
    if convention == "rho":
        if e0:
            var_parts.insert(0, unit + (f"^{e0}" if e0 != 1 else ""))
        return "*".join(var_parts) if var_parts else "1"
    if e0 > 0:
        var_parts.append(unit + (f"^{e0}" if e0 != 1 else ""))
    numerator = "*".join(var_parts) if var_parts else "1"
    if e0 < 0:
        return f"{numerator}/{unit}" + (f"^{-e0}" if e0 != -1 else "")
    return numerator


def render_terms(
    poly: MomentPoly,
    convention: str = "rho",
    normalized: bool = False,
) -> list[tuple[str, str]]:
    """Ordered ``(monomial, value)`` string pairs.

    With ``normalized=True`` each value is multiplied by the product of the
    factorials of the variable exponents, the normalization in which the
    values of single-variable monomials are intersection numbers.
    """
    out: list[tuple[str, str]] = []
    if poly.log_coeff:
        out.append((f"log({unit_symbol(convention)})", format_rational(poly.log_coeff)))
    for key, coeff in ordered_terms(poly):
        value = coeff
        if normalized:
            for l, e in enumerate(key):
                if l and e:
                    value *= factorial(e)
        out.append((render_monomial(key, convention), format_rational(value)))
    return out


def render_str(poly: MomentPoly, convention: str = "rho") -> str:
    parts = []
    if poly.log_coeff:
        parts.append(f"{format_rational(poly.log_coeff)}*log({unit_symbol(convention)})")
    for key, coeff in ordered_terms(poly):
        mono = render_monomial(key, convention)
        if mono == "1":
            parts.append(format_rational(coeff))
        elif coeff == 1:
            parts.append(mono)
        elif coeff == -1:
            parts.append(f"-{mono}")
        else:
            parts.append(f"{format_rational(coeff)}*{mono}")
    if not parts:
        return "0"
    return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# Laurent polynomials in boundary variables


ZKey = tuple[int, ...]


class ZLaurent:
    """Laurent polynomial in ``z_1 .. z_nvars`` with moment-polynomial coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(
        self,
        nvars: int,
        terms: Mapping[ZKey, object] | None = None,
    ) -> None:
        if nvars < 1:
            raise RingError("boundary objects need at least one variable")
        clean: dict[ZKey, MomentPoly] = {}
        if terms:
            for raw_key, raw_coeff in terms.items():
                key = tuple(raw_key)
                if len(key) != nvars:
                    raise RingError(f"exponent key {key} does not have {nvars} entries")
                coeff = raw_coeff if isinstance(raw_coeff, MomentPoly) else MomentPoly.constant(raw_coeff)  # type: ignore[arg-type]
                if coeff.log_coeff:
                    raise LogTerm("boundary-variable coefficients must be log-free")
                if coeff.is_zero:
                    continue
                prev = clean.get(key)
                if prev is None:
                    clean[key] = coeff
                else:
                    total = prev + coeff
                    if total.is_zero:
                        del clean[key]
                    else:
                        clean[key] = total
        self.nvars = nvars
        self.terms = clean

    @classmethod
    def zero(cls, nvars: int) -> "ZLaurent":
        return cls(nvars)

    @classmethod
    def monomial(cls, nvars: int, zexps: Iterable[int], coeff: object = 1) -> "ZLaurent":
        return cls(nvars, {tuple(zexps): coeff})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ZLaurent):
            return self.nvars == other.nvars and self.terms == other.terms
        return NotImplemented

    def _same_space(self, other: "ZLaurent") -> None:
        if self.nvars != other.nvars:
            raise RingError(
                f"variable count mismatch: {self.nvars} vs {other.nvars}"
            )

    def __neg__(self) -> "ZLaurent":
        out = ZLaurent(self.nvars)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __add__(self, other: object) -> "ZLaurent":
        if not isinstance(other, ZLaurent):
            return NotImplemented
        self._same_space(other)
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            prev = terms.get(key)
            if prev is None:
                terms[key] = coeff
            else:
                total = prev + coeff
                if total.is_zero:
                    del terms[key]
                else:
                    terms[key] = total
        out = ZLaurent(self.nvars)
        out.terms = terms
        return out

    def __sub__(self, other: object) -> "ZLaurent":
        if not isinstance(other, ZLaurent):
            return NotImplemented
        return self + (-other)

    def scale(self, factor: object) -> "ZLaurent":
        """Multiply every coefficient by a moment polynomial or scalar."""
        if not isinstance(factor, MomentPoly):
            factor = MomentPoly.constant(factor)
        if factor.log_coeff:
            raise LogTerm("boundary-variable coefficients must be log-free")
        out = ZLaurent(self.nvars)
        if factor.is_zero:
            return out
        terms: dict[ZKey, MomentPoly] = {}
        for key, coeff in self.terms.items():
            val = coeff * factor
            if not val.is_zero:
                terms[key] = val
        out.terms = terms
        return out

    def __mul__(self, other: object) -> "ZLaurent":
        if isinstance(other, (int, Fraction, MomentPoly)):
            return self.scale(other)
        if not isinstance(other, ZLaurent):
            return NotImplemented
        self._same_space(other)
        acc: dict[ZKey, MomentPoly] = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(ka, kb))
                val = ca * cb
                prev = acc.get(key)
                acc[key] = val if prev is None else prev + val
        out = ZLaurent(self.nvars)
        out.terms = {k: c for k, c in acc.items() if not c.is_zero}
        return out

    def __rmul__(self, other: object) -> "ZLaurent":
        if isinstance(other, (int, Fraction, MomentPoly)):
            return self.scale(other)
        return NotImplemented

    def shift(self, var: int, amount: int) -> "ZLaurent":
        """Multiply by ``z_var ** amount``."""
        out = ZLaurent(self.nvars)
        out.terms = {
            k[:var] + (k[var] + amount,) + k[var + 1:]: c for k, c in self.terms.items()
        }
        return out

    def dz(self, var: int) -> "ZLaurent":
        """Derivative in the boundary variable ``z_var``."""
        terms: dict[ZKey, MomentPoly] = {}
        for key, coeff in self.terms.items():
            e = key[var]
            if not e:
                continue
            new = key[:var] + (e - 1,) + key[var + 1:]
            val = coeff.scale(e)
            prev = terms.get(new)
            if prev is not None:
                val = prev + val
            if val.is_zero:
                terms.pop(new, None)
            else:
                terms[new] = val
        out = ZLaurent(self.nvars)
        out.terms = terms
        return out

    def map_coefficients(self, fn: Callable[[MomentPoly], MomentPoly]) -> "ZLaurent":
        out = ZLaurent(self.nvars)
        terms: dict[ZKey, MomentPoly] = {}
        for key, coeff in self.terms.items():
            val = fn(coeff)
            if not val.is_zero:
                terms[key] = val
        out.terms = terms
        return out

    def partial_moment(self, index: int) -> "ZLaurent":
        """Apply a moment-variable partial derivative to every coefficient."""
        return self.map_coefficients(lambda c: c.partial(index))

    def moment_support(self) -> set[int]:
        out: set[int] = set()
        for coeff in self.terms.values():
            out |= coeff.moment_support()
        return out

    def exponent_range(self, var: int) -> tuple[int, int]:
        """(min, max) exponent of ``z_var``; (0, 0) for the zero polynomial."""
        if not self.terms:
            return (0, 0)
        exps = [k[var] for k in self.terms]
        return (min(exps), max(exps))

    def collect(self, var: int) -> dict[int, "ZLaurent"]:
        """Group terms by the exponent of ``z_var``; values drop that variable."""
        if self.nvars < 2:
            raise RingError("collect needs at least two variables; use terms directly")
        out: dict[int, ZLaurent] = {}
        for key, coeff in self.terms.items():
            e = key[var]
            rest = key[:var] + key[var + 1:]
            bucket = out.get(e)
            if bucket is None:
                bucket = ZLaurent(self.nvars - 1)
                out[e] = bucket
            prev = bucket.terms.get(rest)
            bucket.terms[rest] = coeff if prev is None else prev + coeff
        for e in list(out):
            out[e].terms = {k: c for k, c in out[e].terms.items() if not c.is_zero}
            if not out[e].terms:
                del out[e]
        return out

    def extract(self, var: int, exponent: int) -> "ZLaurent":
        """Coefficient of ``z_var ** exponent`` as an object in the other variables."""
        if self.nvars < 2:
            raise RingError("extract needs at least two variables")
        out = ZLaurent(self.nvars - 1)
        terms: dict[ZKey, MomentPoly] = {}
        for key, coeff in self.terms.items():
            if key[var] != exponent:
                continue
            rest = key[:var] + key[var + 1:]
            prev = terms.get(rest)
            val = coeff if prev is None else prev + coeff
            terms[rest] = val
        out.terms = {k: c for k, c in terms.items() if not c.is_zero}
        return out

    def coefficient(self, var: int, exponent: int) -> MomentPoly:
        """Coefficient of ``z_var ** exponent`` for single-variable objects."""
        if self.nvars != 1:
            raise RingError("coefficient() is for single-variable objects")
        return self.terms.get((exponent,), MomentPoly.zero())

    def identify(self, var: int, target: int) -> "ZLaurent":
        """Substitute ``z_var := z_target`` and drop the slot of ``z_var``."""
        if var == target:
            raise RingError("identify needs two distinct variables")
        out = ZLaurent(self.nvars - 1)
        terms: dict[ZKey, MomentPoly] = {}
        for key, coeff in self.terms.items():
            merged = list(key)
            merged[target] += merged[var]
            del merged[var]
            new = tuple(merged)
            prev = terms.get(new)
            terms[new] = coeff if prev is None else prev + coeff
        out.terms = {k: c for k, c in terms.items() if not c.is_zero}
        return out

    def embed(self, positions: Sequence[int], nvars: int) -> "ZLaurent":
        """Place variable ``k`` of this object at slot ``positions[k]`` of a larger space."""
        if len(positions) != self.nvars:
            raise RingError("embed needs one target position per variable")
        if len(set(positions)) != len(positions):
            raise RingError("embed positions must be distinct")
        if any(p < 0 or p >= nvars for p in positions):
            raise RingError("embed positions out of range")
        out = ZLaurent(nvars)
        terms: dict[ZKey, MomentPoly] = {}
        for key, coeff in self.terms.items():
            new = [0] * nvars
            for k, e in enumerate(key):
                new[positions[k]] = e
            terms[tuple(new)] = coeff
        out.terms = terms
        return out

    def permute(self, positions: Sequence[int]) -> "ZLaurent":
        """Relabel variables: old variable ``k`` becomes ``z_{positions[k]}``."""
        return self.embed(positions, self.nvars)

    def evaluate(self, points: Sequence[object], moments: Mapping[int, object]) -> object:
        """Evaluate at numeric boundary points and numeric moment values."""
        if len(points) != self.nvars:
            raise RingError(f"expected {self.nvars} points, got {len(points)}")
        total: object = None
        for key, coeff in self.terms.items():
            part = coeff.substitute(moments)
            for z, e in zip(points, key):
                if e:
                    if e < 0 and not z:
                        raise CoincidentPoints("evaluation at z = 0 hits a pole")
                    part = part * z**e
            total = part if total is None else total + part
        return _ZERO if total is None else total

    def bind(self, moments: Mapping[int, object]) -> dict[ZKey, object]:
        """Substitute moment values once, returning exponent -> scalar."""
        out: dict[ZKey, object] = {}
        for key, coeff in self.terms.items():
            val = coeff.substitute(moments)
            if val:
                out[key] = val
        return out

    def __str__(self) -> str:
        return render_z(self)

    def __repr__(self) -> str:
        return f"ZLaurent({render_z(self)})"


def render_z(obj: ZLaurent, convention: str = "rho") -> str:
    if not obj.terms:
        return "0"
    parts = []
    for key in sorted(obj.terms, reverse=True):
        coeff = obj.terms[key]
        zmono = "*".join(
            f"z{i + 1}" + (f"^{e}" if e != 1 else "")
            for i, e in enumerate(key)
            if e
        )
        cstr = render_str(coeff, convention)
        if len(coeff.terms) > 1:
            cstr = f"({cstr})"
        parts.append(f"{cstr}*{zmono}" if zmono else cstr)
    return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# rational boundary objects


FactorKey = tuple[int, int, int]  # (i, j, sign): the factor (z_i + sign * z_j), i < j


def _factor_key(i: int, j: int, sign: int) -> tuple[FactorKey, int]:
    """Normalized factor key and the numerator sign flip it costs."""
    if sign not in (1, -1):
        raise RingError("factor sign must be +1 or -1")
    if i == j:
        raise RingError("pair factors need two distinct variables")
    if i < j:
        return (i, j, sign), 1
    # (z_i + z_j) is symmetric; (z_i - z_j) = -(z_j - z_i)
    return (j, i, sign), (1 if sign == 1 else -1)


def _laurent_times_factor(obj: ZLaurent, factor: FactorKey) -> ZLaurent:
    i, j, sign = factor
    return obj.shift(i, 1) + (obj.shift(j, 1) if sign == 1 else -obj.shift(j, 1))


class ZRational:
    """``num / prod (z_i +- z_j)^m`` with a Laurent-polynomial numerator."""

    __slots__ = ("num", "den")

    def __init__(self, num: ZLaurent, den: Mapping[FactorKey, int] | None = None) -> None:
        self.num = num
        clean: dict[FactorKey, int] = {}
        if den:
            for raw, power in den.items():
                if power < 0:
                    raise RingError("denominator powers must be nonnegative")
                if not power:
                    continue
                key, flip = _factor_key(*raw)
                if flip < 0 and power % 2:
                    self.num = -self.num
                if key[1] >= num.nvars:
                    raise RingError("denominator variable out of range")
                clean[key] = clean.get(key, 0) + power
        self.den = clean

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ZRational):
            diff = self - other
            return diff.num.is_zero
        if isinstance(other, ZLaurent):
            return self == ZRational(other)
        return NotImplemented

    def __neg__(self) -> "ZRational":
        return ZRational(-self.num, dict(self.den))

    def _widen(self, den: Mapping[FactorKey, int]) -> ZLaurent:
        """Numerator re-expressed over the (larger) common denominator ``den``."""
        num = self.num
        for factor, power in den.items():
            deficit = power - self.den.get(factor, 0)
            for _ in range(deficit):
                num = _laurent_times_factor(num, factor)
        return num

    def __add__(self, other: object) -> "ZRational":
        if isinstance(other, ZLaurent):
            other = ZRational(other)
        if not isinstance(other, ZRational):
            return NotImplemented
        if self.num.nvars != other.num.nvars:
            raise RingError("variable count mismatch in rational addition")
        den: dict[FactorKey, int] = dict(self.den)
        for factor, power in other.den.items():
            den[factor] = max(den.get(factor, 0), power)
        return ZRational(self._widen(den) + other._widen(den), den)

    __radd__ = __add__

    def __sub__(self, other: object) -> "ZRational":
        if isinstance(other, ZLaurent):
            other = ZRational(other)
        if not isinstance(other, ZRational):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: object) -> "ZRational":
        if isinstance(other, (int, Fraction, MomentPoly)):
            return ZRational(self.num.scale(other), dict(self.den))
        if isinstance(other, ZLaurent):
            return ZRational(self.num * other, dict(self.den))
        if not isinstance(other, ZRational):
            return NotImplemented
        den = dict(self.den)
        for factor, power in other.den.items():
            den[factor] = den.get(factor, 0) + power
        return ZRational(self.num * other.num, den)

    def __rmul__(self, other: object) -> "ZRational":
        if isinstance(other, (int, Fraction, MomentPoly, ZLaurent)):
            return self * other
        return NotImplemented

    def scale(self, factor: object) -> "ZRational":
        return ZRational(self.num.scale(factor), dict(self.den))

    def shift(self, var: int, amount: int) -> "ZRational":
        return ZRational(self.num.shift(var, amount), dict(self.den))

    def divide_by_factor(self, i: int, j: int, sign: int, power: int = 1) -> "ZRational":
        """Multiply the denominator by ``(z_i + sign*z_j)^power``."""
        key, flip = _factor_key(i, j, sign)
        num = self.num if flip > 0 or power % 2 == 0 else -self.num
        den = dict(self.den)
        den[key] = den.get(key, 0) + power
        return ZRational(num, den)

    def partial_moment(self, index: int) -> "ZRational":
        return ZRational(self.num.partial_moment(index), dict(self.den))

    def map_coefficients(self, fn: Callable[[MomentPoly], MomentPoly]) -> "ZRational":
        return ZRational(self.num.map_coefficients(fn), dict(self.den))

    def dz(self, var: int) -> "ZRational":
        """Derivative in ``z_var`` (quotient rule; denominator powers grow by one)."""
        touching = [(f, m) for f, m in self.den.items() if var in (f[0], f[1])]
        den = dict(self.den)
        for factor, power in touching:
            den[factor] = power + 1
        out = self.num.dz(var)
        for factor, _ in touching:
            out = _laurent_times_factor(out, factor)
        for factor, power in touching:
            # d(z_i + s z_j)/dz_var is 1 at i, s at j
            dfac = 1 if var == factor[0] else factor[2]
            piece = self.num.scale(Fraction(-power * dfac))
            for other, _ in touching:
                if other != factor:
                    piece = _laurent_times_factor(piece, other)
            out = out + piece
        return ZRational(out, den)

    def identify(self, var: int, target: int) -> "ZRational":
        """Substitute ``z_var := z_target`` and drop the slot of ``z_var``."""
        if var == target:
            raise RingError("identify needs two distinct variables")
        num = self.num
        extra_shift = 0
        scale = _ONE
        den_new: dict[FactorKey, int] = {}
        for (i, j, sign), power in self.den.items():
            if {i, j} == {var, target}:
                if sign == -1:
                    raise CoincidentPoints("identification hits a (z_i - z_j) pole")
                # (z + z) = 2 z
                extra_shift += power
                scale /= Fraction(2) ** power
                continue
            a = target if i == var else i
            b = target if j == var else j
            key, flip = _factor_key(a, b, sign)
            if flip < 0 and power % 2:
                scale = -scale
            den_new[key] = den_new.get(key, 0) + power
        merged = num.identify(var, target)
        new_target = target if target < var else target - 1
        if extra_shift:
            merged = merged.shift(new_target, -extra_shift)
        merged = merged.scale(scale)
        remapped: dict[FactorKey, int] = {}
        for (i, j, sign), power in den_new.items():
            a = i if i < var else i - 1
            b = j if j < var else j - 1
            key, flip = _factor_key(a, b, sign)
            if flip < 0 and power % 2:
                merged = -merged
            remapped[key] = remapped.get(key, 0) + power
        return ZRational(merged, remapped)

    def embed(self, positions: Sequence[int], nvars: int) -> "ZRational":
        num = self.num.embed(positions, nvars)
        den: dict[FactorKey, int] = {}
        out = ZRational(num)
        for (i, j, sign), power in self.den.items():
            key, flip = _factor_key(positions[i], positions[j], sign)
            if flip < 0 and power % 2:
                out.num = -out.num
            den[key] = den.get(key, 0) + power
        out.den = den
        return out

    def reduce(self) -> "ZLaurent | ZRational":
        """Cancel denominator factors that divide the numerator exactly."""
        num = self.num
        den: dict[FactorKey, int] = {}
        for factor, power in self.den.items():
            remaining = power
            while remaining:
                quotient = _synthetic_divide(num, factor)
                if quotient is None:
                    break
                num = quotient
                remaining -= 1
            if remaining:
                den[factor] = remaining
        if not den:
            return num
        return ZRational(num, den)

    def evaluate(self, points: Sequence[object], moments: Mapping[int, object]) -> object:
        value = self.num.evaluate(points, moments)
        for (i, j, sign), power in self.den.items():
            base = points[i] + sign * points[j]
            if not base:
                raise CoincidentPoints(
                    f"evaluation point makes (z{i + 1} {'+' if sign == 1 else '-'} z{j + 1}) vanish"
                )
            value = value / base**power
        return value

    def __str__(self) -> str:
        den = "*".join(
            f"(z{i + 1}{'+' if s == 1 else '-'}z{j + 1})" + (f"^{m}" if m != 1 else "")
            for (i, j, s), m in sorted(self.den.items())
        )
        return f"({self.num}) / ({den})" if den else str(self.num)

    def __repr__(self) -> str:
        return f"ZRational({self})"


def _synthetic_divide(num: ZLaurent, factor: FactorKey) -> ZLaurent | None:
    """Exact quotient ``num / (z_i + sign*z_j)`` or ``None`` when not divisible."""
    i, j, sign = factor
    if num.is_zero:
        return num
    if num.nvars == 1:
        raise RingError("pair factors need at least two variables")
    by_exp = num.collect(i)
    lo = min(by_exp)
    hi = max(by_exp)
    # view as a polynomial of degree (hi - lo) in z_i; divide by (z_i - root),
    # root = -sign * z_j, which multiplies by z_j in the coefficient ring
    jj = j if j < i else j - 1  # slot of z_j once z_i is removed
    width = num.nvars - 1
    zero = ZLaurent.zero(width)
    quotient: dict[int, ZLaurent] = {}
    carry = zero
    for e in range(hi, lo, -1):
        carry = by_exp.get(e, zero) + carry
        quotient[e - 1] = carry
        # multiply by root for the next column: -sign * z_j
        carry = carry.shift(jj, 1).scale(Fraction(-sign))
    remainder = by_exp.get(lo, zero) + carry
    if not remainder.is_zero:
        return None
    out = ZLaurent(num.nvars)
    terms: dict[ZKey, MomentPoly] = {}
    for e, part in quotient.items():
        for rest, coeff in part.terms.items():
            key = rest[:i] + (e,) + rest[i:]
            terms[key] = coeff
    out.terms = terms
    return out
