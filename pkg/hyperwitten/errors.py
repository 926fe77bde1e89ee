"""Exceptions raised by the hyperwitten pipeline"""
from __future__ import annotations

from typing import Any, Optional


class HyperWittenError(Exception):
    """Base class: every error names the pipeline stage that raised it"""

    stage: str = "hyperwitten"
    exit_code: int = 1

    def __init__(self, message: str = "", *, stage: Optional[str] = None) -> None:
        super().__init__(message)
        if stage is not None:
            self.stage = stage

    def describe(self) -> str:
        return f"{self.stage}: {self.__class__.__name__}: {self}"


class DegenerateInput(HyperWittenError):
    """The input violates a genericity or nondegeneracy requirement"""

    exit_code = 2


# trigpoly


class PotentialFormatError(HyperWittenError):
    stage = "potential"


class NoCriticalPoints(HyperWittenError):
    stage = "morse"


class DegenerateCritical(DegenerateInput):
    stage = "morse"


class NotAlternating(DegenerateInput):
    stage = "morse"


# transseries


class EmptySeries(HyperWittenError):
    stage = "transseries"


class NegativeDegree(HyperWittenError):
    stage = "transseries"


class UnrepresentableTerm(HyperWittenError):
    stage = "transseries"


# semiclassical


class NonPositiveBarrier(HyperWittenError):
    stage = "semiclassical"


class ZeroSlope(HyperWittenError):
    stage = "semiclassical"


class GammaPole(HyperWittenError):
    stage = "semiclassical"


class ContourTooClose(HyperWittenError):
    stage = "semiclassical"


# transfer


class ConstantTermSurvives(DegenerateInput):
    stage = "transfer"


# polygon_solver


class DegenerateEdge(DegenerateInput):
    stage = "polygon"

    def __init__(self, message: str = "", *, edge: Any = None) -> None:
        super().__init__(message)
        self.edge = edge


class NoProgress(DegenerateInput):
    stage = "polygon"


# numeric_verify


class GridTooCoarse(HyperWittenError):
    stage = "numeric"


class ConvergenceFailure(HyperWittenError):
    stage = "numeric"


class NonPositiveEigenvalue(HyperWittenError):
    stage = "numeric"


class CountMismatch(HyperWittenError):
    stage = "numeric"
    exit_code = 3

    def __init__(self, message: str = "", *, report: Any = None) -> None:
        super().__init__(message)
        self.report = report


# cli


class ConfigError(HyperWittenError):
    stage = "config"
