"""Leading-order monodromy, connection and tunneling data of a Morse potential

Indices are 1-based and cyclic: odd j label minima, even j label maxima,
and q_{2n+1} is q_1 shifted by one period.  All symbols use the
rescaled energy E_r, E = h E_r.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Any, Optional, Union

import numpy as np

from .errors import ContourTooClose, NonPositiveBarrier, ZeroSlope
from .log import log_info
from .special import gamma
from .transseries import TransTerm
from .trigpoly import MorseData, TrigPoly, morse_data

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)

CONTOUR_MIN_DISTANCE = 1e-6
QUADRATURE_ORDER = 16
QUADRATURE_NODES = 2400


@dataclass(frozen=True)
class AffineForm:
    """slope * E_r + const"""

    slope: float
    const: float

    def __add__(self, other: Union[AffineForm, float]) -> AffineForm:
        if isinstance(other, AffineForm):
            return AffineForm(self.slope + other.slope, self.const + other.const)
        return AffineForm(self.slope, self.const + other)

    __radd__ = __add__

    def __neg__(self) -> AffineForm:
        return AffineForm(-self.slope, -self.const)

    def __sub__(self, other: Union[AffineForm, float]) -> AffineForm:
        return self + (-other)

    def __rsub__(self, other: float) -> AffineForm:
        return -self + other

    def __call__(self, E_r: complex) -> complex:
        return self.slope * E_r + self.const

    def to_json(self) -> dict[str, float]:
        return {"slope": self.slope, "const": self.const}


@dataclass(frozen=True)
class MonodromyExponents:
    j: int
    s_gamma: AffineForm
    s_gamma_prime: AffineForm
    s_delta: AffineForm
    s_delta_prime: AffineForm

    def to_json(self) -> dict[str, Any]:
        return {
            "j": self.j,
            "s_gamma": self.s_gamma.to_json(),
            "s_gamma_prime": self.s_gamma_prime.to_json(),
            "s_delta": self.s_delta.to_json(),
            "s_delta_prime": self.s_delta_prime.to_json(),
        }


@dataclass(frozen=True)
class TunnelingData:
    mu: tuple[TransTerm, ...]
    tau: tuple[TransTerm, ...]
    barrier_actions: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.tau) // 2

    def to_json(self) -> dict[str, Any]:
        return {
            "mu": [t.to_json() for t in self.mu],
            "tau": [t.to_json() for t in self.tau],
            "barrier_actions": list(self.barrier_actions),
        }


def _check_index(md: MorseData, j: int) -> None:
    if not 1 <= j <= 2 * md.n:
        raise ValueError(f"index {j} outside 1..{2 * md.n}")


def monodromy_exponents(md: MorseData, j: int) -> MonodromyExponents:
    _check_index(md, j)
    curvature = md.point(j).curvature
    s_gamma = AffineForm(-1.0 / (2.0 * curvature), -1.0)
    return MonodromyExponents(
        j=j,
        s_gamma=s_gamma,
        s_gamma_prime=-1.0 - s_gamma,
        s_delta=-0.5 - s_gamma,
        s_delta_prime=0.5 + s_gamma,
    )


def mu_leading(md: MorseData, j: int) -> TransTerm:
    _check_index(md, j)
    return TransTerm(1j * math.pi / abs(md.point(j).curvature), e_deg=1)


def tau_leading(md: MorseData, j: int) -> TransTerm:
    """Tunneling monodromy across the barrier between q_j and q_{j+1}"""
    _check_index(md, j)
    here, there = md.point(j), md.point(j + 1)
    if j % 2:
        rate = -2.0 * (there.value - here.value)
    else:
        rate = -2.0 * (here.value - there.value)
    if rate >= 0:
        raise NonPositiveBarrier(f"barrier {j} has action {-rate:.6g} <= 0")
    coeff = math.pi / math.sqrt(abs(here.curvature) * abs(there.curvature))
    return TransTerm(coeff, e_deg=1, rate=rate)


def _slope_left_of(md: MorseData, j: int, eps: float) -> tuple[float, float]:
    """(q_j - eps, f'(q_j - eps))"""
    a = md.position(j) - eps
    slope = float(md.f.differentiate()(a))
    if slope == 0.0:
        raise ZeroSlope(f"f'(q_{j} - {eps:g}) vanishes")
    return a, slope


def connection_leading(md: MorseData, j: int, eps: Optional[float] = None) -> TransTerm:
    """c'_j at a minimum (odd j) and c_j at a maximum (even j)"""
    eps = md.default_eps(j) if eps is None else eps
    if eps <= 0:
        raise ValueError("eps must be positive")
    point = md.point(j)
    a, slope = _slope_left_of(md, j, eps)
    drop = point.value - float(md.f(a))
    if j % 2:
        coeff = 2j * SQRT_PI * slope / math.sqrt(point.curvature)
        return TransTerm(coeff, e_deg=0, h2_pow=-1, rate=2.0 * drop)
    coeff = -1j * SQRT_PI / (2.0 * math.sqrt(abs(point.curvature)) * slope)
    return TransTerm(coeff, e_deg=1, h2_pow=1, rate=-2.0 * drop)


def amplitude_ratio(
    md: MorseData, j: int, eps: Optional[float] = None, eps_next: Optional[float] = None
) -> TransTerm:
    """WKB amplitude ratio carried from q_j - eps to q_{j+1} - eps_next"""
    eps = md.default_eps(j) if eps is None else eps
    eps_next = md.default_eps(j + 1) if eps_next is None else eps_next
    a, slope = _slope_left_of(md, j, eps)
    b, slope_next = _slope_left_of(md, j + 1, eps_next)
    action = float(md.f(b)) - float(md.f(a))
    if j % 2:
        return TransTerm(slope_next / slope, rate=-2.0 * action)
    return TransTerm(slope / slope_next, rate=2.0 * action)


def tunneling_product(
    md: MorseData, j: int, eps: Optional[float] = None, eps_next: Optional[float] = None
) -> TransTerm:
    """tau_j rebuilt from two connection coefficients and the amplitude ratio"""
    _check_index(md, j)
    return (
        connection_leading(md, j, eps)
        * connection_leading(md, j + 1, eps_next)
        * amplitude_ratio(md, j, eps, eps_next)
    )


def tunneling_data(md: MorseData) -> TunnelingData:
    indices = range(1, 2 * md.n + 1)
    tau = tuple(tau_leading(md, j) for j in indices)
    return TunnelingData(
        mu=tuple(mu_leading(md, j) for j in indices),
        tau=tau,
        barrier_actions=tuple(-t.rate for t in tau),
    )


def gamma_connection(
    md: MorseData, j: int, E_r: complex, h: float, eps: Optional[float] = None
) -> complex:
    """Connection coefficient c'_j at a minimum with its full Gamma-function factor"""
    _check_index(md, j)
    if j % 2 == 0:
        raise ValueError("the Gamma-factor formula applies at minima (odd j)")
    if h <= 0:
        raise ValueError("h must be positive")
    eps = md.default_eps(j) if eps is None else eps
    point = md.point(j)
    curvature = point.curvature
    a, slope = _slope_left_of(md, j, eps)
    shifted = (E_r + curvature) / curvature
    z = shifted / 2.0 + 0.5
    log_amplitude = cmath.log(-2.0 * slope / math.sqrt(2.0 * curvature))
    return (
        -1j
        * math.sqrt(2.0 * math.pi)
        * cmath.exp(-shifted / 2.0 * math.log(h))
        / gamma(z)
        * cmath.exp(shifted * log_amplitude)
        * math.exp(2.0 * (point.value - float(md.f(a))) / h)
    )


def turning_points(f: TrigPoly, q0: float, E: float) -> tuple[float, float]:
    """The two real solutions of f'(q)^2 = E next to the critical point q0"""
    df = f.differentiate()
    d2f = df.differentiate()
    curvature = float(d2f(q0))
    root_E = math.sqrt(E)
    found = []
    for sign in (-1.0, 1.0):
        q = q0 + sign * root_E / curvature
        for _ in range(60):
            step = (float(df(q)) - sign * root_E) / float(d2f(q))
            q -= step
            if abs(step) < 1e-15 * max(1.0, abs(q)):
                break
        found.append(q)
    return min(found), max(found)


def _graded_panels(towards_end: bool, levels: int) -> list[tuple[float, float]]:
    """Panels of [0, 1] shrinking geometrically towards one end"""
    edges = [1.0 - 0.5**k for k in range(levels + 1)] + [1.0]
    edges = sorted(set(edges))
    panels = list(zip(edges[:-1], edges[1:]))
    if towards_end:
        return panels
    return [(1.0 - t1, 1.0 - t0) for t0, t1 in reversed(panels)]


def _split(panels: list[tuple[float, float]], pieces: int) -> list[tuple[float, float]]:
    out = []
    for t0, t1 in panels:
        cuts = np.linspace(t0, t1, pieces + 1)
        out.extend(zip(cuts[:-1], cuts[1:]))
    return out


def sigma_log_integral(
    f: TrigPoly,
    j: int,
    eps: float,
    E: float,
    nodes: int = QUADRATURE_NODES,
    md: Optional[MorseData] = None,
) -> complex:
    """Loop integral of -f''/(2i sqrt(E - f'^2)) around the left turning point of q_j

    The path runs a -> m - i delta -> m + i delta -> a with a = q_j - eps,
    m the midpoint of the turning points and delta their half distance.
    The square root starts at +i|f'(a)| and is continued along the path.
    """
    if E <= 0:
        raise ValueError("E must be positive")
    md = morse_data(f) if md is None else md
    q_j = md.position(j)
    a = q_j - eps
    lower, upper = turning_points(f, q_j, E)
    if not (a < lower < upper < q_j + eps):
        raise ValueError(f"turning points ({lower:.6g}, {upper:.6g}) not within eps of q_{j}")
    m = 0.5 * (lower + upper)
    delta = 0.5 * (upper - lower)
    if delta < CONTOUR_MIN_DISTANCE:
        raise ContourTooClose(f"turning points {2 * delta:.3g} apart")

    corners = (complex(a), complex(m, -delta), complex(m, delta), complex(a))
    length = abs(corners[1] - corners[0])
    levels = max(1, math.ceil(math.log2(4.0 * length / delta))) + 2
    segments = [
        _graded_panels(True, levels),
        [(k / 8.0, (k + 1) / 8.0) for k in range(8)],
        _graded_panels(False, levels),
    ]
    base = sum(len(s) for s in segments)
    pieces = max(1, math.ceil(nodes / (QUADRATURE_ORDER * base)))
    x, w = np.polynomial.legendre.leggauss(QUADRATURE_ORDER)

    params, weights, which = [], [], []
    for index, panels in enumerate(segments):
        for t0, t1 in _split(panels, pieces):
            params.append(0.5 * (t1 - t0) * x + 0.5 * (t1 + t0))
            weights.append(0.5 * (t1 - t0) * w)
            which.append(np.full(QUADRATURE_ORDER, index))
    t = np.concatenate(params)
    weight = np.concatenate(weights)
    segment = np.concatenate(which)
    start = np.array(corners[:3])[segment]
    span = np.array([corners[k + 1] - corners[k] for k in range(3)])[segment]
    q = start + t * span

    closest = min(np.min(np.abs(q - lower)), np.min(np.abs(q - upper)))
    if closest < CONTOUR_MIN_DISTANCE:
        raise ContourTooClose(f"quadrature node within {closest:.3g} of a turning point")

    df = f.differentiate()
    d2f = df.differentiate()
    principal = np.sqrt(E - df(q) ** 2 + 0j)
    root = np.empty_like(principal)
    previous = 1j * math.sqrt(float(df(a)) ** 2 - E)
    for k, value in enumerate(principal):
        previous = value if abs(value - previous) <= abs(value + previous) else -value
        root[k] = previous
    integrand = -d2f(q) / (2j * root)
    result = complex(np.sum(weight * integrand * span))
    log_info(logger, "sigma")("j=%d E=%.3g nodes=%d result=%s", j, E, t.size, result)
    return result


def sigma_log_closed_form(f: TrigPoly, j: int, eps: float, E: float, md: Optional[MorseData] = None) -> complex:
    """Exact value of the loop integral for monotone f' between q_j - eps and the turning point"""
    md = morse_data(f) if md is None else md
    slope = float(f.differentiate()(md.position(j) - eps))
    value = math.acosh(abs(slope) / math.sqrt(E))
    return complex(value if j % 2 else -value)


def sigma_log_leading(f: TrigPoly, j: int, eps: float, E: float, md: Optional[MorseData] = None) -> complex:
    """Ln[-2 f'(q_j - eps)/sqrt(E)] for odd j, -Ln[2 f'(q_j - eps)/sqrt(E)] for even j"""
    md = morse_data(f) if md is None else md
    slope = float(f.differentiate()(md.position(j) - eps))
    if j % 2:
        return cmath.log(-2.0 * slope / math.sqrt(E))
    return -cmath.log(2.0 * slope / math.sqrt(E))


def tunneling_json(md: MorseData, td: TunnelingData) -> dict[str, Any]:
    return {
        **td.to_json(),
        "monodromy": [monodromy_exponents(md, j).to_json() for j in range(1, 2 * md.n + 1)],
    }
