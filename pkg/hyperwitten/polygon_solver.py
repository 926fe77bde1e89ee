"""Newton-polygon solver for transseries-polynomial equations in E

Support points (degree, rate) open quadrants down and to the right; the
upper boundary of their convex hull has strictly decreasing slopes, and
each positive-slope edge of horizontal length n carries n exponentially
small solutions E ~ r h^(d/2) exp(-k/h), k the slope.  Every solution is
then refined level by level: substituting E = exp(-k/h) h^(d/2) (r + E1)
leaves an equation whose E1-linear term dominates, and the upper-left
edge of its polygon gives the next level.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from . import polyroots
from .errors import DegenerateEdge, EmptySeries, NegativeDegree, NoProgress
from .log import log_info, log_warning
from .transseries import (
    TransSeries,
    rate_tol,
    rates_close,
    scaled_exp,
    shear_substitute,
    shift_substitute,
)

logger = logging.getLogger(__name__)
info = log_info(logger, "polygon")
warn = log_warning(logger, "polygon")

CLUSTER_TOL = 1e-7
CANCEL_TOL = 1e-10
LATTICE_TOL = 1e-6
LATTICE_STATES = 20000
DEFAULT_DEPTH = 2


@dataclass(frozen=True)
class SupportPoint:
    """Maximal-rate term of one degree, minimal power of h among ties"""

    e_deg: int
    rate: float
    coeff: complex
    h2_pow: int


@dataclass(frozen=True)
class Edge:
    slope: float
    start: SupportPoint
    end: SupportPoint

    @property
    def length(self) -> int:
        return self.end.e_deg - self.start.e_deg

    def rate_at(self, e_deg: int) -> float:
        return self.start.rate + self.slope * (e_deg - self.start.e_deg)

    def __str__(self) -> str:
        return (
            f"edge ({self.start.e_deg}, {self.start.rate:.6g}) -> "
            f"({self.end.e_deg}, {self.end.rate:.6g}), slope {self.slope:.6g}"
        )


@dataclass(frozen=True)
class NewtonPolygon:
    points: tuple[SupportPoint, ...]
    hull: tuple[int, ...]
    edges: tuple[Edge, ...]

    @property
    def slopes(self) -> tuple[float, ...]:
        return tuple(e.slope for e in self.edges)

    @property
    def positive_edges(self) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.slope > 0)

    def point_at(self, e_deg: int) -> Optional[SupportPoint]:
        for point in self.points:
            if point.e_deg == e_deg:
                return point
        return None

    def height(self, e_deg: float) -> float:
        """Upper boundary of the polygon at a given degree"""
        first = self.points[self.hull[0]]
        if e_deg < first.e_deg:
            return -math.inf
        for edge in self.edges:
            if e_deg <= edge.end.e_deg:
                return edge.start.rate + edge.slope * (e_deg - edge.start.e_deg)
        return self.points[self.hull[-1]].rate


@dataclass(frozen=True)
class EdgeRoot:
    """E ~ r h^(h2_pow/2) exp(-k/h)"""

    k: float
    r: complex
    h2_pow: int = 0


@dataclass(frozen=True)
class Level:
    """One term coeff h^(h2_pow/2) exp(-rate/h) of a solution, rate cumulative"""

    rate: float
    coeff: complex
    h2_pow: int = 0

    def evaluate(self, h: float) -> complex:
        return self.coeff * scaled_exp(0.5 * self.h2_pow * math.log(h) - self.rate / h, h)

    def to_json(self) -> dict[str, Any]:
        value = complex(self.coeff)
        return {"rate": self.rate, "re": value.real, "im": value.imag, "h2": self.h2_pow}


@dataclass(frozen=True)
class TransSolution:
    levels: tuple[Level, ...]
    exact_termination: bool = False
    h_corrections_dropped: bool = False
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def leading(self) -> Level:
        return self.levels[0]

    def evaluate(self, h: float, depth: Optional[int] = None) -> complex:
        return sum((level.evaluate(h) for level in self.levels[:depth]), 0j)

    def to_json(self) -> dict[str, Any]:
        return {
            "levels": [level.to_json() for level in self.levels],
            "exact_termination": self.exact_termination,
            "h_corrections_dropped": self.h_corrections_dropped,
            "warnings": list(self.warnings),
        }


def build_polygon(ts: TransSeries) -> NewtonPolygon:
    if not ts:
        raise EmptySeries("cannot build the Newton polygon of the empty series")
    if ts.min_degree < 0:
        raise NegativeDegree("clear denominators before building the Newton polygon")
    points = []
    for e_deg in ts.degrees:
        block = ts.block(e_deg).terms
        top = block[0].rate
        tied = [t for t in block if rates_close(t.rate, top)]
        best = min(tied, key=lambda t: t.h2_pow)
        points.append(SupportPoint(e_deg, top, best.coeff, best.h2_pow))

    hull = [0]
    edges = []
    while True:
        i = hull[-1]
        here = points[i]
        slopes = [
            ((p.rate - here.rate) / (p.e_deg - here.e_deg), j)
            for j, p in enumerate(points[i + 1 :], start=i + 1)
        ]
        if not slopes:
            break
        steepest = max(s for s, _ in slopes)
        if steepest <= rate_tol() * (1.0 + abs(steepest)):
            break
        # farthest point among those on the supporting line
        j = max(j for s, j in slopes if rates_close(s, steepest))
        edges.append(Edge(steepest, here, points[j]))
        hull.append(j)
    return NewtonPolygon(tuple(points), tuple(hull), tuple(edges))


def edge_coefficients(polygon: NewtonPolygon, edge: Edge) -> tuple[np.ndarray, list[int]]:
    """Coefficients A_0..A_n of the points on the edge, and their h-powers"""
    coeffs = np.zeros(edge.length + 1, dtype=complex)
    powers: list[Optional[int]] = [None] * (edge.length + 1)
    for point in polygon.points:
        offset = point.e_deg - edge.start.e_deg
        if 0 <= offset <= edge.length and rates_close(point.rate, edge.rate_at(point.e_deg)):
            coeffs[offset] = point.coeff
            powers[offset] = point.h2_pow
    return coeffs, powers


def _root_h_power(edge: Edge, powers: list[Optional[int]]) -> tuple[int, bool]:
    """Power of h (doubled) carried by the roots; False if h-powers are not affine"""
    drop = powers[0] - powers[-1]
    if drop % edge.length:
        return 0, False
    step = drop // edge.length
    for offset, power in enumerate(powers):
        if power is not None and power != powers[0] - step * offset:
            return 0, False
    return step, True


def solve_edge(
    ts: TransSeries, edge: Edge, polygon: Optional[NewtonPolygon] = None
) -> tuple[EdgeRoot, ...]:
    if edge.slope <= 0:
        raise ValueError(f"{edge} does not have positive slope")
    polygon = build_polygon(ts) if polygon is None else polygon
    coeffs, powers = edge_coefficients(polygon, edge)
    h2_pow, affine = _root_h_power(edge, powers)
    if not affine:
        warn("h-powers %s on %s are not affine in the degree; ignored", powers, edge)
    roots = polyroots.roots(coeffs)
    coincident = polyroots.clusters(roots, CLUSTER_TOL)
    if coincident:
        i, j = coincident[0]
        raise DegenerateEdge(
            f"{edge}: roots {roots[i]:.6g} and {roots[j]:.6g} coincide", edge=edge
        )
    return tuple(EdgeRoot(edge.slope, complex(r), h2_pow) for r in roots if r != 0)


def _lattice_member(rate: float, generators: list[float]) -> bool:
    """rate within LATTICE_TOL of a nonnegative integer combination of generators"""
    if rate < -LATTICE_TOL:
        return False
    reachable = {0.0}
    frontier = [0.0]
    while frontier and len(reachable) < LATTICE_STATES:
        following = []
        for value in frontier:
            for g in generators:
                total = value + g
                if abs(total - rate) <= LATTICE_TOL:
                    return True
                key = round(total, 9)
                if total < rate and key not in reachable:
                    reachable.add(key)
                    following.append(total)
        frontier = following
    return any(abs(value - rate) <= LATTICE_TOL for value in reachable)


def _lattice_generators(ts: TransSeries) -> list[float]:
    rates = sorted({round(t.rate, 9) for t in ts})
    differences = {
        round(s - r, 9) for i, r in enumerate(rates) for s in rates[i + 1 :] if s - r > LATTICE_TOL
    }
    return sorted(differences)


def _drop_edge_companions(series: TransSeries, edge_rate: float) -> tuple[TransSeries, bool]:
    """Remove degree-0 terms left at the edge rate by higher powers of h"""
    kept, dropped = [], False
    for term in series:
        if term.e_deg == 0 and (term.rate > edge_rate or rates_close(term.rate, edge_rate)):
            dropped = True
        else:
            kept.append(term)
    return (TransSeries(kept), dropped) if dropped else (series, False)


def _refine(ts: TransSeries, first: EdgeRoot, edge_rate: float, depth: int) -> TransSolution:
    levels = [Level(first.k, first.r, first.h2_pow)]
    messages: list[str] = []
    dropped_any = False
    current = shift_substitute(
        shear_substitute(ts, first.k, first.h2_pow), first.r, cancel_tol=CANCEL_TOL
    )
    exact = False
    while True:
        current, dropped = _drop_edge_companions(current, edge_rate)
        if dropped:
            dropped_any = True
            message = f"h-power corrections dropped at level {len(levels)}"
            warn(message)
            messages.append(message)
        if not current or current.min_degree > 0:
            exact = True
            break
        if len(levels) >= depth:
            break
        polygon = build_polygon(current)
        edges = polygon.positive_edges
        if not edges or edges[0].start.e_deg != 0:
            raise NoProgress(f"degree-0 terms remain without a positive edge after level {len(levels)}")
        edge = edges[0]
        if edge.length != 1:
            raise DegenerateEdge(f"correction {edge} has length {edge.length}", edge=edge)
        (step,) = solve_edge(current, edge, polygon)
        previous = levels[-1]
        levels.append(Level(previous.rate + step.k, step.r, previous.h2_pow + step.h2_pow))
        edge_rate = edge.start.rate
        current = shift_substitute(
            shear_substitute(current, step.k, step.h2_pow), step.r, cancel_tol=CANCEL_TOL
        )
    generators = _lattice_generators(ts)
    for level in levels:
        if not _lattice_member(level.rate, generators):
            message = f"rate {level.rate:.9g} is not generated by differences of the input rates"
            warn(message)
            messages.append(message)
    return TransSolution(tuple(levels), exact, dropped_any, tuple(messages))


def solve(ts: TransSeries, depth: int = DEFAULT_DEPTH) -> tuple[TransSolution, ...]:
    """All exponentially small solutions, refined to ``depth`` levels"""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    polygon = build_polygon(ts)
    solutions = []
    for edge in polygon.positive_edges:
        edge_rate = edge.start.rate - edge.slope * edge.start.e_deg
        for root in solve_edge(ts, edge, polygon):
            info("level 1: k=%.9g r=%s h^(%d/2)", root.k, root.r, root.h2_pow)
            solutions.append(_refine(ts, root, edge_rate, depth))
    solutions.sort(key=lambda s: (s.leading.rate, s.leading.coeff.real, s.leading.coeff.imag))
    return tuple(solutions)


def residual(ts: TransSeries, solution: TransSolution, h: float, depth: Optional[int] = None) -> float:
    """|ts(E)| relative to its largest term, E the truncated solution

    The terms are summed after factoring out the largest one, so the ratio stays
    finite where the terms themselves overflow.
    """
    E = solution.evaluate(h, depth)
    if E == 0:
        raise ValueError(f"h = {h:g} is too small: the solution underflows double precision")
    logs = [t.log_value(E, h) for t in ts]
    if not logs:
        return 0.0
    top = max(value.real for value in logs)
    return abs(sum(cmath.exp(value - top) for value in logs))
