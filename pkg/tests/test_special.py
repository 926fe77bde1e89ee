import cmath
import math

import pytest

from hyperwitten.errors import GammaPole
from hyperwitten.special import gamma


@pytest.mark.parametrize(
    "z, expected",
    [
        (1.0, 1.0),
        (5.0, 24.0),
        (0.5, math.sqrt(math.pi)),
        (-0.5, -2.0 * math.sqrt(math.pi)),
        (1 + 1j, 0.49801566811835604 - 0.15494982830181069j),
    ],
)
def test_gamma_values(z, expected):
    assert gamma(z) == pytest.approx(expected, rel=1e-12)


def test_gamma_matches_math_gamma():
    for x in (0.1, 1.7, 3.3, 7.25, 12.5):
        assert gamma(x).real == pytest.approx(math.gamma(x), rel=1e-12)


def test_poles():
    for z in (0.0, -1.0, -4.0):
        with pytest.raises(GammaPole):
            gamma(z)


@pytest.mark.parametrize("z", [0.3, 0.3 + 0.4j, -1.7])
def test_reflection_identity(z):
    assert gamma(z) * gamma(1 - z) == pytest.approx(cmath.pi / cmath.sin(cmath.pi * z), rel=1e-12)
