import json
import math

import numpy as np
import pytest

from hyperwitten import resource
from hyperwitten.transseries import TransSeries
from hyperwitten.trigpoly import TrigPoly, morse_data

TWO_PI = 2.0 * math.pi


def three_well() -> TrigPoly:
    return TrigPoly(
        a=(0.0, 0.3 / TWO_PI, 0.2 / (2 * TWO_PI), -1.0 / TWO_PI),
        b=(0.0, 0.3 / (2 * TWO_PI), 0.0),
    )


@pytest.fixture
def two_well_potential():
    return TrigPoly.from_json(resource.load("paper_example.json"))


@pytest.fixture
def two_well_md(two_well_potential):
    return morse_data(two_well_potential)


@pytest.fixture
def sine_potential():
    return TrigPoly.from_json(resource.load("sine_example.json"))


@pytest.fixture
def three_well_potential():
    return three_well()


@pytest.fixture
def toy_series():
    return TransSeries.from_json(resource.load("polygon_example.json"))


@pytest.fixture
def rng():
    return np.random.default_rng(20231017)


@pytest.fixture
def write_json(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj), encoding="utf-8")
        return path

    return write
