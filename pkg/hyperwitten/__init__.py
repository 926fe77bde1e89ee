"""hyperwitten: low-lying spectrum of the Witten Laplacian on the circle"""
from __future__ import annotations

__version__ = "0.1.0"

from . import resource
