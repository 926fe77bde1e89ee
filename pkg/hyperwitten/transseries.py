"""Finite exponential-polynomial symbols c E^j h^(p/2) exp(s/h) and their arithmetic

A :class:`TransSeries` is kept in canonical form: terms sorted by
(e_deg ascending, rate descending, h2_pow ascending), like terms merged
when their rates agree to ``rate_tol * (1 + |rate|)``, and coefficients
below ``1e-14`` of the largest one dropped.
"""
from __future__ import annotations

import cmath
import contextlib
import contextvars
import math
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Sequence, Union

from .errors import EmptySeries, NegativeDegree, UnrepresentableTerm
from .util import complex_from_json, complex_to_json

DEFAULT_RATE_TOL = 1e-9
DROP_TOL = 1e-14
EXP_LIMIT = 709.0

_rate_tol: contextvars.ContextVar[float] = contextvars.ContextVar(
    "rate_tol", default=DEFAULT_RATE_TOL
)


@contextlib.contextmanager
def rate_tolerance(tol: float):
    """Temporarily change the like-term merging tolerance"""
    token = _rate_tol.set(tol)
    try:
        yield
    finally:
        _rate_tol.reset(token)


def rate_tol() -> float:
    return _rate_tol.get()


def rates_close(r: float, s: float, tol: float | None = None) -> bool:
    tol = rate_tol() if tol is None else tol
    return abs(r - s) <= tol * (1.0 + max(abs(r), abs(s)))


def scaled_exp(exponent: complex, h: float) -> complex:
    """exp(exponent), with an error naming h when the result overflows a double"""
    if exponent.real > EXP_LIMIT:
        raise ValueError(f"h = {h:g} is too small: exp({exponent.real:.6g}) overflows double precision")
    return cmath.exp(exponent)


def _integral(value: Any, name: str) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise UnrepresentableTerm(f"{name} must be an integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class TransTerm:
    coeff: complex
    e_deg: int = 0
    h2_pow: int = 0
    rate: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeff", complex(self.coeff))
        object.__setattr__(self, "e_deg", _integral(self.e_deg, "e_deg"))
        object.__setattr__(self, "h2_pow", _integral(self.h2_pow, "h2_pow"))
        object.__setattr__(self, "rate", float(self.rate))
        if not (cmath.isfinite(self.coeff) and math.isfinite(self.rate)):
            raise UnrepresentableTerm(f"non-finite term {self!r}")

    def __repr__(self) -> str:
        return (
            f"TransTerm({self.coeff:.6g} E^{self.e_deg} h^({self.h2_pow}/2) "
            f"e^({self.rate:.9g}/h))"
        )

    def __mul__(self, other: Union[TransTerm, complex, float]) -> TransTerm:
        if isinstance(other, TransTerm):
            return TransTerm(
                self.coeff * other.coeff,
                self.e_deg + other.e_deg,
                self.h2_pow + other.h2_pow,
                self.rate + other.rate,
            )
        if isinstance(other, TransSeries):
            return NotImplemented
        return TransTerm(self.coeff * other, self.e_deg, self.h2_pow, self.rate)

    __rmul__ = __mul__

    def __neg__(self) -> TransTerm:
        return self * -1.0

    def inverse(self) -> TransTerm:
        if self.coeff == 0:
            raise ZeroDivisionError("cannot invert a zero term")
        return TransTerm(1.0 / self.coeff, -self.e_deg, -self.h2_pow, -self.rate)

    def __truediv__(self, other: TransTerm) -> TransTerm:
        return self * other.inverse()

    @property
    def is_exponentially_small(self) -> bool:
        return self.rate < 0

    def log_value(self, E: complex, h: float) -> complex:
        """ln of the term at (E, h); E and coeff must be nonzero"""
        power = self.e_deg * cmath.log(E) if self.e_deg else 0j
        return cmath.log(self.coeff) + power + 0.5 * self.h2_pow * math.log(h) + self.rate / h

    def evaluate(self, E: complex, h: float) -> complex:
        if self.coeff == 0 or (E == 0 and self.e_deg):
            return self.coeff * complex(E) ** self.e_deg
        return scaled_exp(self.log_value(E, h), h)

    def to_json(self) -> dict[str, Any]:
        return {**complex_to_json(self.coeff), "e": self.e_deg, "h2": self.h2_pow, "rate": self.rate}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> TransTerm:
        if obj.get("ln_h", 0):
            raise UnrepresentableTerm("powers of ln h are not representable")
        try:
            return cls(
                complex_from_json(obj),
                obj.get("e", 0),
                obj.get("h2", 0),
                float(obj.get("rate", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as err:
            raise UnrepresentableTerm(f"malformed term {obj!r}: {err}") from err


Operand = Union["TransSeries", TransTerm, complex, float, int]


def _canonical(terms: Iterable[TransTerm], cancel_tol: float = 0.0) -> tuple[TransTerm, ...]:
    tol = rate_tol()
    groups: dict[tuple[int, int], list[TransTerm]] = {}
    for term in terms:
        if term.coeff != 0:
            groups.setdefault((term.e_deg, term.h2_pow), []).append(term)
    merged: list[TransTerm] = []
    for (e_deg, h2_pow), group in groups.items():
        group.sort(key=lambda t: -t.rate)
        anchor = None
        total, weight = 0j, 0.0
        for term in group:
            if anchor is None or not rates_close(anchor, term.rate, tol):
                if anchor is not None:
                    merged.append((TransTerm(total, e_deg, h2_pow, anchor), weight))
                anchor, total, weight = term.rate, 0j, 0.0
            total += term.coeff
            weight += abs(term.coeff)
        merged.append((TransTerm(total, e_deg, h2_pow, anchor), weight))
    kept = [t for t, w in merged if t.coeff != 0 and abs(t.coeff) > cancel_tol * w]
    if kept:
        floor = DROP_TOL * max(abs(t.coeff) for t in kept)
        kept = [t for t in kept if abs(t.coeff) > floor]
    kept.sort(key=lambda t: (t.e_deg, -t.rate, t.h2_pow))
    return tuple(kept)


class TransSeries:
    """Immutable canonical sum of :class:`TransTerm`"""

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[TransTerm] = (), *, cancel_tol: float = 0.0) -> None:
        self._terms = _canonical(terms, cancel_tol)

    @classmethod
    def constant(cls, value: complex) -> TransSeries:
        return cls([TransTerm(value)])

    @classmethod
    def of(cls, *terms: TransTerm) -> TransSeries:
        return cls(terms)

    @property
    def terms(self) -> tuple[TransTerm, ...]:
        return self._terms

    def __iter__(self) -> Iterator[TransTerm]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        return "TransSeries(" + " + ".join(map(repr, self._terms)) + ")"

    @staticmethod
    def _lift(other: Operand) -> TransSeries:
        if isinstance(other, TransSeries):
            return other
        if isinstance(other, TransTerm):
            return TransSeries([other])
        return TransSeries.constant(other)

    def __add__(self, other: Operand) -> TransSeries:
        return TransSeries(self._terms + self._lift(other)._terms)

    __radd__ = __add__

    def __neg__(self) -> TransSeries:
        return TransSeries(-t for t in self._terms)

    def __sub__(self, other: Operand) -> TransSeries:
        return self + (-self._lift(other))

    def __rsub__(self, other: Operand) -> TransSeries:
        return self._lift(other) - self

    def __mul__(self, other: Operand) -> TransSeries:
        right = self._lift(other)._terms
        return TransSeries(s * t for s in self._terms for t in right)

    __rmul__ = __mul__

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted({t.e_deg for t in self._terms}))

    @property
    def min_degree(self) -> int:
        if not self._terms:
            raise EmptySeries("the empty series has no degree")
        return self._terms[0].e_deg

    @property
    def max_degree(self) -> int:
        if not self._terms:
            raise EmptySeries("the empty series has no degree")
        return max(t.e_deg for t in self._terms)

    def block(self, e_deg: int) -> TransSeries:
        return TransSeries(t for t in self._terms if t.e_deg == e_deg)

    def without_block(self, e_deg: int) -> TransSeries:
        return TransSeries(t for t in self._terms if t.e_deg != e_deg)

    def divide_by_E(self, power: int = 1) -> TransSeries:
        return self * TransTerm(1.0, -power)

    def evaluate(self, E: complex, h: float) -> complex:
        return sum((t.evaluate(E, h) for t in self._terms), 0j)

    def max_term(self, E: complex, h: float) -> float:
        return max((abs(t.evaluate(E, h)) for t in self._terms), default=0.0)

    def leading_term(self) -> TransTerm:
        return leading_term(self)

    def approx_equal(self, other: TransSeries, rel: float = 1e-12) -> bool:
        if len(self) != len(other):
            return False
        scale = max((abs(t.coeff) for t in self._terms), default=0.0)
        for s, t in zip(self._terms, other._terms):
            if (s.e_deg, s.h2_pow) != (t.e_deg, t.h2_pow) or not rates_close(s.rate, t.rate):
                return False
            if abs(s.coeff - t.coeff) > rel * scale:
                return False
        return True

    def to_json(self) -> dict[str, Any]:
        return {"terms": [t.to_json() for t in self._terms]}

    @classmethod
    def from_json(cls, obj: Any) -> TransSeries:
        terms = obj["terms"] if isinstance(obj, dict) else obj
        return cls(TransTerm.from_json(t) for t in terms)


def product(factors: Sequence[Operand]) -> TransSeries:
    result = TransSeries.constant(1.0)
    for factor in factors:
        result = result * factor
    return result


def leading_term(ts: TransSeries) -> TransTerm:
    """Largest rate, then smallest degree, then smallest power of h"""
    if not ts:
        raise EmptySeries("the empty series has no leading term")
    top = max(t.rate for t in ts)
    candidates = [t for t in ts if rates_close(t.rate, top)]
    return min(candidates, key=lambda t: (t.e_deg, t.h2_pow))


def clear_denominators(ts: TransSeries) -> tuple[TransSeries, TransTerm]:
    """Multiply by E^-d exp(-s/h) so that every degree is nonnegative"""
    if not ts:
        raise EmptySeries("cannot clear denominators of the empty series")
    lowest = ts.min_degree
    if lowest >= 0:
        return ts, TransTerm(1.0)
    top = max(t.rate for t in ts.block(lowest))
    shift = TransTerm(1.0, -lowest, 0, -top)
    return ts * shift, shift


def shear_substitute(ts: TransSeries, k: float, h2_shift: int = 0) -> TransSeries:
    """E = exp(-k/h) h^(h2_shift/2) E0"""
    if k == 0 and h2_shift == 0:
        return ts
    return TransSeries(
        TransTerm(t.coeff, t.e_deg, t.h2_pow + h2_shift * t.e_deg, t.rate - k * t.e_deg)
        for t in ts
    )


def shift_substitute(ts: TransSeries, r: complex, cancel_tol: float = 0.0) -> TransSeries:
    """E = r + E1, expanded binomially

    Merged coefficients at or below ``cancel_tol`` times the sum of the
    magnitudes of their contributions are treated as exact cancellations.
    """
    if any(t.e_deg < 0 for t in ts):
        raise NegativeDegree("shift_substitute needs nonnegative degrees")
    if r == 0:
        return ts
    return TransSeries(
        (
            TransTerm(t.coeff * math.comb(t.e_deg, i) * r ** (t.e_deg - i), i, t.h2_pow, t.rate)
            for t in ts
            for i in range(t.e_deg + 1)
        ),
        cancel_tol=cancel_tol,
    )
