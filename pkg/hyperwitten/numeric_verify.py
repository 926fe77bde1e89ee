"""Fourier-collocation discretization of P = -h^2 d^2 + (f')^2 - h f'' and comparison with asymptotics"""
from __future__ import annotations

import asyncio
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Optional, Sequence

import numpy as np

from .eigensolver import smallest_eigenvalues
from .errors import CountMismatch, GridTooCoarse, NonPositiveEigenvalue
from .log import log_info, log_warning
from .transfer import EigenAsym
from .trigpoly import TrigPoly
from .util import to_csv

logger = logging.getLogger(__name__)

DEFAULT_H = (0.1, 0.07, 0.05, 0.035)
DEFAULT_N = 512
THRESHOLD_POWER = 1.25
POSITIVITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    N: int
    h: float
    entries: np.ndarray
    potential_norm: float

    @property
    def scale(self) -> float:
        """Norm bound used for positivity and zero-mode checks"""
        return self.potential_norm + self.h**2 * (math.pi * self.N) ** 2


def second_derivative_matrix(N: int) -> np.ndarray:
    """Spectral d^2/dq^2 for 1-periodic functions on q_i = i/N, N even"""
    step = 2.0 * math.pi / N
    k = np.arange(N)
    k = np.minimum(k, N - k)
    column = np.empty(N)
    column[0] = -(math.pi**2) / (3.0 * step**2) - 1.0 / 6.0
    kk = k[1:]
    column[1:] = -((-1.0) ** kk) / (2.0 * np.sin(kk * step / 2.0) ** 2)
    offsets = np.subtract.outer(np.arange(N), np.arange(N)) % N
    return (2.0 * math.pi) ** 2 * column[offsets]


def _potential(f: TrigPoly, h: float, N: int) -> np.ndarray:
    q = np.arange(N) / N
    df = f.differentiate()
    return df(q) ** 2 - h * df.differentiate()(q)


def operator_scale(f: TrigPoly, h: float, N: int) -> float:
    return float(np.max(np.abs(_potential(f, h, N)))) + h**2 * (math.pi * N) ** 2


def build_operator(f: TrigPoly, h: float, N: int) -> OperatorMatrix:
    if h <= 0:
        raise ValueError("h must be positive")
    if N % 2:
        raise GridTooCoarse(f"grid size {N} must be even")
    if N < 8 * (2 * f.M + 1):
        raise GridTooCoarse(f"grid size {N} below 8(2M+1) = {8 * (2 * f.M + 1)}")
    potential = _potential(f, h, N)
    entries = -(h**2) * second_derivative_matrix(N)
    entries[np.diag_indices(N)] += potential
    return OperatorMatrix(N=N, h=h, entries=entries, potential_norm=float(np.max(np.abs(potential))))


def smallest_eigs(A: OperatorMatrix, m: int, refine: bool = True) -> np.ndarray:
    values = smallest_eigenvalues(A.entries, m, refine)
    floor = -POSITIVITY_TOL * A.scale
    if values[0] < floor:
        log_warning(logger, "numeric")(
            "eigenvalue %.3g below positivity floor %.3g at h=%g", values[0], floor, A.h
        )
    return values


@dataclass(frozen=True)
class DecayFit:
    """lambda ~ exp(logA) h exp(-rate/h)"""

    rate: float
    logA: float
    residual: float

    def to_json(self) -> dict[str, float]:
        return {"rate": self.rate, "logA": self.logA, "residual": self.residual}


def decay_fit(samples: Sequence[tuple[float, float]]) -> DecayFit:
    if len(samples) < 3:
        raise ValueError("a decay fit needs at least three samples")
    ordered = sorted(samples)
    h = np.array([s[0] for s in ordered], dtype=float)
    lam = np.array([s[1] for s in ordered], dtype=float)
    if np.any(lam <= 0):
        raise NonPositiveEigenvalue(f"cannot fit nonpositive eigenvalues {lam[lam <= 0]}")
    y = np.log(lam) - np.log(h)
    design = np.column_stack([np.ones_like(h), -1.0 / h])
    (logA, rate), *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.max(np.abs(design @ np.array([logA, rate]) - y)))
    return DecayFit(rate=float(rate), logA=float(logA), residual=residual)


def eigenvalues_at(f: TrigPoly, h: float, N: int, m: int) -> np.ndarray:
    log_info(logger, "numeric")("h=%g N=%d", h, N)
    return smallest_eigs(build_operator(f, h, N), m)


async def _sweep(
    f: TrigPoly, h_list: Sequence[float], N: int, m: int, threads: Optional[int]
) -> list[np.ndarray]:
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=threads or len(h_list) or 1) as pool:
        return await asyncio.gather(
            *(loop.run_in_executor(pool, partial(eigenvalues_at, f, h, N, m)) for h in h_list)
        )


def sweep(
    f: TrigPoly,
    h_list: Sequence[float],
    N: int = DEFAULT_N,
    m: int = 3,
    threads: Optional[int] = None,
) -> dict[float, np.ndarray]:
    """m smallest eigenvalues for every h, keyed in descending h"""
    ordered = sorted(set(h_list), reverse=True)
    results = asyncio.run(_sweep(f, ordered, N, m, threads))
    return dict(zip(ordered, results))


@dataclass(frozen=True)
class SweepRow:
    h: float
    N: int
    eigenvalues: tuple[float, ...]
    threshold: float
    count_below: int
    asymptotic: tuple[float, ...] = ()
    ratios: tuple[float, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "h": self.h,
            "N": self.N,
            "eigenvalues": list(self.eigenvalues),
            "threshold": self.threshold,
            "count_below": self.count_below,
            "asymptotic": list(self.asymptotic),
            "ratios": list(self.ratios),
        }


@dataclass(frozen=True)
class VerificationReport:
    n: int
    rows: tuple[SweepRow, ...]
    fit: Optional[DecayFit] = None
    count_ok: bool = True
    zero_mode_ok: bool = True
    trend_ok: tuple[bool, ...] = ()
    notes: tuple[str, ...] = field(default=())

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "count_ok": self.count_ok,
            "zero_mode_ok": self.zero_mode_ok,
            "trend_ok": list(self.trend_ok),
            "fit": self.fit.to_json() if self.fit else None,
            "rows": [row.to_json() for row in self.rows],
            "notes": list(self.notes),
        }

    def to_csv(self) -> str:
        width = max(len(row.eigenvalues) for row in self.rows)
        modes = max(len(row.ratios) for row in self.rows)
        header = (
            ["h", "N"]
            + [f"lambda{i}" for i in range(width)]
            + [f"asym_{i + 1}" for i in range(modes)]
            + [f"ratio_{i + 1}" for i in range(modes)]
        )
        return to_csv(
            header,
            (
                [row.h, row.N, *row.eigenvalues, *row.asymptotic, *row.ratios]
                for row in self.rows
            ),
        )


def eigenvalue_table(results: dict[float, np.ndarray], N: int, threshold_power: float = THRESHOLD_POWER) -> tuple[SweepRow, ...]:
    return tuple(
        SweepRow(
            h=h,
            N=N,
            eigenvalues=tuple(float(v) for v in values),
            threshold=h**threshold_power,
            count_below=int(np.sum(values < h**threshold_power)),
        )
        for h, values in results.items()
    )


def verify_asymptotics(
    f: TrigPoly,
    asym: Sequence[EigenAsym],
    h_list: Sequence[float] = DEFAULT_H,
    N: int = DEFAULT_N,
    threshold_power: float = THRESHOLD_POWER,
    threads: Optional[int] = None,
) -> VerificationReport:
    """Compare the n low-lying asymptotic eigenvalues with the numerical spectrum"""
    log = log_info(logger, "verify")
    n = len(asym)
    nonzero = [a for a in asym if not a.is_zero_mode]
    results = sweep(f, h_list, N, n + 2, threads)
    rows, notes = [], []
    count_ok = zero_mode_ok = True
    for row in eigenvalue_table(results, N, threshold_power):
        if row.count_below != n:
            count_ok = False
            notes.append(f"h={row.h:g}: {row.count_below} eigenvalues below h^{threshold_power:g}, expected {n}")
        if abs(row.eigenvalues[0]) >= POSITIVITY_TOL * operator_scale(f, row.h, N):
            zero_mode_ok = False
            notes.append(f"h={row.h:g}: lowest eigenvalue {row.eigenvalues[0]:.3g} is not a zero mode")
        predicted = sorted(a.value(row.h, depth=1).real for a in nonzero)
        measured = row.eigenvalues[1 : 1 + len(predicted)]
        ratios = tuple(lam / p for lam, p in zip(measured, predicted))
        rows.append(
            SweepRow(row.h, row.N, row.eigenvalues, row.threshold, row.count_below, tuple(predicted), ratios)
        )
        log("h=%g count=%d ratios=%s", row.h, row.count_below, ratios)

    trend = []
    for i in range(len(nonzero)):
        deviations = [abs(r.ratios[i] - 1.0) for r in rows if i < len(r.ratios)]
        trend.append(all(b < a for a, b in zip(deviations, deviations[1:])))

    fit = None
    if nonzero and len(rows) >= 3:
        samples = [(r.h, r.eigenvalues[1]) for r in rows]
        if all(lam > 0 for _, lam in samples):
            fit = decay_fit(samples)

    report = VerificationReport(
        n=n,
        rows=tuple(rows),
        fit=fit,
        count_ok=count_ok,
        zero_mode_ok=zero_mode_ok,
        trend_ok=tuple(trend),
        notes=tuple(notes),
    )
    if not count_ok:
        raise CountMismatch("; ".join(notes), report=report)
    return report

