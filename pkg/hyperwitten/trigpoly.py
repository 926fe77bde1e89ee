"""Trigonometric-polynomial superpotentials and their Morse data"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Union

import numpy as np

from . import polyroots
from .errors import (
    DegenerateCritical,
    NoCriticalPoints,
    NotAlternating,
    PotentialFormatError,
)
from .log import log_info

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

UNIT_CIRCLE_TOL = 1e-8
DEDUPLICATE_TOL = 1e-10
MORSE_THRESHOLD = 1e-6
NEWTON_STEPS = 50

Argument = Union[float, complex, np.ndarray]


@dataclass(frozen=True)
class TrigPoly:
    """f(q) = a_0 + sum_m a_m cos(2 pi m q) + b_m sin(2 pi m q), period 1"""

    a: tuple[float, ...]
    b: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        a = tuple(float(x) for x in self.a) or (0.0,)
        b = tuple(float(x) for x in self.b)
        if len(b) < len(a) - 1:
            b = b + (0.0,) * (len(a) - 1 - len(b))
        if len(a) < len(b) + 1:
            a = a + (0.0,) * (len(b) + 1 - len(a))
        if not all(math.isfinite(x) for x in a + b):
            raise PotentialFormatError("coefficients must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(a={list(self.a)}, b={list(self.b)})"

    @property
    def M(self) -> int:
        return len(self.a) - 1

    @property
    def degree(self) -> int:
        """Highest harmonic with a nonzero coefficient"""
        for m in range(self.M, 0, -1):
            if self.a[m] != 0.0 or self.b[m - 1] != 0.0:
                return m
        return 0

    def __call__(self, q: Argument) -> Argument:
        if self.M == 0:
            return self.a[0] + 0.0 * np.asarray(q)
        harmonics = np.arange(1, self.M + 1)
        phase = TWO_PI * np.multiply.outer(q, harmonics)
        return self.a[0] + np.cos(phase) @ np.array(self.a[1:]) + np.sin(phase) @ np.array(self.b)

    def differentiate(self) -> TrigPoly:
        m = TWO_PI * np.arange(1, self.M + 1)
        return TrigPoly(
            a=(0.0, *(m * np.array(self.b))),
            b=tuple(-m * np.array(self.a[1:])),
        )

    def shift(self, c: float) -> TrigPoly:
        """The potential q -> f(q + c)"""
        theta = TWO_PI * np.arange(1, self.M + 1) * c
        a = np.array(self.a[1:])
        b = np.array(self.b)
        return TrigPoly(
            a=(self.a[0], *(a * np.cos(theta) + b * np.sin(theta))),
            b=tuple(b * np.cos(theta) - a * np.sin(theta)),
        )

    def __add__(self, other: Union[TrigPoly, float]) -> TrigPoly:
        if isinstance(other, TrigPoly):
            size = max(self.M, other.M)
            a = np.zeros(size + 1)
            b = np.zeros(size)
            for poly in (self, other):
                a[: poly.M + 1] += poly.a
                b[: poly.M] += poly.b
            return TrigPoly(tuple(a), tuple(b))
        return TrigPoly((self.a[0] + float(other), *self.a[1:]), self.b)

    __radd__ = __add__

    def __mul__(self, scale: float) -> TrigPoly:
        return TrigPoly(tuple(scale * x for x in self.a), tuple(scale * x for x in self.b))

    __rmul__ = __mul__

    def __neg__(self) -> TrigPoly:
        return -1.0 * self

    def sup_norm(self, samples: int = 4096) -> float:
        q = np.arange(max(samples, 64 * (self.M + 1))) / max(samples, 64 * (self.M + 1))
        return float(np.max(np.abs(self(q))))

    def to_json(self) -> dict[str, Any]:
        return {"a": list(self.a), "b": list(self.b)}

    @classmethod
    def from_json(cls, obj: Any) -> TrigPoly:
        if not isinstance(obj, dict) or "a" not in obj:
            raise PotentialFormatError('potential must be an object with fields "a" and "b"')
        try:
            a = [float(x) for x in obj["a"]]
            b = [float(x) for x in obj.get("b", [])]
        except (TypeError, ValueError) as err:
            raise PotentialFormatError(f"coefficients must be numbers: {err}") from err
        if len(a) == 0 or len(b) != len(a) - 1:
            raise PotentialFormatError(
                f'expected len(b) == len(a) - 1, got {len(a)} and {len(b)}'
            )
        return cls(tuple(a), tuple(b))


class Kind(str, Enum):
    MINIMUM = "minimum"
    MAXIMUM = "maximum"


@dataclass(frozen=True)
class CriticalPoint:
    q: float
    value: float
    curvature: float
    kind: Kind

    def to_json(self) -> dict[str, Any]:
        return {
            "q": self.q,
            "value": self.value,
            "curvature": self.curvature,
            "kind": self.kind.value,
        }


def _unit_circle_polynomial(df: TrigPoly) -> np.ndarray:
    """Ascending coefficients of z^M f'(q) in z = exp(2 pi i q)"""
    M = df.degree
    coeffs = np.zeros(2 * M + 1, dtype=complex)
    coeffs[M] = df.a[0]
    for m in range(1, M + 1):
        A, B = df.a[m], df.b[m - 1]
        coeffs[M + m] = 0.5 * (A - 1j * B)
        coeffs[M - m] = 0.5 * (A + 1j * B)
    return coeffs


def _newton(df: TrigPoly, d2f: TrigPoly, q: float) -> float:
    for _ in range(NEWTON_STEPS):
        slope = float(d2f(q))
        if slope == 0.0:
            break
        step = float(df(q)) / slope
        q -= step
        if abs(step) < 1e-15:
            break
    return q % 1.0


def _cyclic_distance(p: float, q: float) -> float:
    d = abs(p - q) % 1.0
    return min(d, 1.0 - d)


def critical_points(f: TrigPoly, tol: float = UNIT_CIRCLE_TOL) -> tuple[float, ...]:
    """Real zeros of f' on [0, 1), sorted, each checked for the Morse condition"""
    df = f.differentiate()
    d2f = df.differentiate()
    if df.degree == 0:
        raise NoCriticalPoints("a constant potential has no isolated critical points")
    z = polyroots.companion_roots(_unit_circle_polynomial(df))
    on_circle = z[np.abs(np.abs(z) - 1.0) < tol]
    scale = df.sup_norm()
    found: list[float] = []
    for root in on_circle:
        q = _newton(df, d2f, float(np.angle(root)) / TWO_PI)
        if abs(float(df(q))) > 1e-10 * scale:
            logger.warning("discarding spurious root at q=%.16g (f'=%.3g)", q, float(df(q)))
            continue
        if all(_cyclic_distance(q, p) > DEDUPLICATE_TOL for p in found):
            found.append(q)
    if not found:
        raise NoCriticalPoints(f"no real critical points found for {f!r}")
    found.sort()
    curvatures = np.array([float(d2f(q)) for q in found])
    largest = float(np.max(np.abs(curvatures)))
    for q, c in zip(found, curvatures):
        if abs(c) < MORSE_THRESHOLD * largest:
            raise DegenerateCritical(f"f''({q:.16g}) = {c:.3g} violates the Morse condition")
    return tuple(found)


@dataclass(frozen=True)
class MorseData:
    """Alternating critical points, rotated so that index 1 is a minimum"""

    f: TrigPoly
    n: int
    points: tuple[CriticalPoint, ...]
    label_offset: int
    _unwrapped: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        unwrapped = []
        first = self.points[0].q
        for point in self.points:
            unwrapped.append(point.q if point.q >= first else point.q + 1.0)
        object.__setattr__(self, "_unwrapped", tuple(unwrapped))

    def point(self, j: int) -> CriticalPoint:
        """1-based, cyclic: point(2n + 1) is point(1)"""
        return self.points[(j - 1) % len(self.points)]

    def position(self, j: int) -> float:
        """Unwrapped coordinate of q_j, increasing in j, position(2n + 1) = q_1 + 1"""
        wraps, index = divmod(j - 1, len(self.points))
        return self._unwrapped[index] + wraps

    def default_eps(self, j: int) -> float:
        return 0.25 * (self.position(j) - self.position(j - 1))

    @property
    def minima(self) -> tuple[CriticalPoint, ...]:
        return self.points[::2]

    @property
    def maxima(self) -> tuple[CriticalPoint, ...]:
        return self.points[1::2]

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "label_offset": self.label_offset,
            "critical_points": [p.to_json() for p in self.points],
        }


def morse_data(f: TrigPoly) -> MorseData:
    log = log_info(logger, "morse")
    d2f = f.differentiate().differentiate()
    points = []
    for q in critical_points(f):
        curvature = float(d2f(q))
        kind = Kind.MINIMUM if curvature > 0 else Kind.MAXIMUM
        points.append(CriticalPoint(q, float(f(q)), curvature, kind))
    offset = next(
        (i for i, p in enumerate(points) if p.kind == Kind.MINIMUM), None
    )
    if offset is None or len(points) % 2:
        raise NotAlternating(f"{len(points)} critical points cannot alternate on the circle")
    rotated = tuple(points[offset:] + points[:offset])
    for j, point in enumerate(rotated):
        expected = Kind.MINIMUM if j % 2 == 0 else Kind.MAXIMUM
        if point.kind != expected:
            raise NotAlternating(f"critical point {j + 1} at q={point.q:.6g} is a {point.kind.value}")
        if point.kind == Kind.MAXIMUM:
            before, after = rotated[j - 1], rotated[(j + 1) % len(rotated)]
            if not (point.value > before.value and point.value > after.value):
                raise NotAlternating(f"maximum at q={point.q:.6g} does not exceed its neighbours")
    md = MorseData(f=f, n=len(rotated) // 2, points=rotated, label_offset=offset)
    log("n=%d minima at %s", md.n, [round(p.q, 6) for p in md.minima])
    return md
