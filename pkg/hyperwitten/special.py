"""Gamma function for complex arguments

Lanczos approximation with g = 7 and nine coefficients, accurate to about
15 significant digits for Re(z) >= 1/2.  The left half plane is reached
through the reflection formula

    Gamma(z) Gamma(1 - z) = pi / sin(pi z)
"""
from __future__ import annotations

import cmath
import math

from .errors import GammaPole

POLE_TOL = 1e-12

_G = 7
_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _check_pole(z: complex) -> None:
    nearest = round(z.real)
    if nearest <= 0 and abs(z - nearest) < POLE_TOL:
        raise GammaPole(f"Gamma has a pole at {nearest}, argument {z}")


def gamma(z: complex) -> complex:
    z = complex(z)
    _check_pole(z)
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * gamma(1.0 - z))
    z -= 1.0
    x = _COEFFICIENTS[0]
    for i, c in enumerate(_COEFFICIENTS[1:], start=1):
        x += c / (z + i)
    t = z + _G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * x
