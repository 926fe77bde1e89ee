"""Polynomial roots: companion-matrix eigenvalues polished by Aberth iteration"""
from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from .log import log_info

logger = logging.getLogger(__name__)
info = log_info(logger, "polyroots")

MAX_SWEEPS = 200
TOLERANCE = 1e-13


def _trim(coeffs: Sequence[complex]) -> np.ndarray:
    """Drop vanishing top-degree coefficients (ascending order)"""
    c = np.asarray(coeffs, dtype=complex)
    nonzero = np.flatnonzero(c != 0)
    if nonzero.size == 0:
        raise ValueError("the zero polynomial has no finite set of roots")
    return c[: nonzero[-1] + 1]


def companion_roots(coeffs: Sequence[complex]) -> np.ndarray:
    """Roots of sum(coeffs[k] z**k) as eigenvalues of the companion matrix"""
    c = _trim(coeffs)
    degree = c.size - 1
    if degree == 0:
        return np.empty(0, dtype=complex)
    monic = c[:-1] / c[-1]
    companion = np.zeros((degree, degree), dtype=complex)
    companion[1:, :-1] = np.eye(degree - 1)
    companion[:, -1] = -monic
    return np.linalg.eigvals(companion)


def aberth(
    coeffs: Sequence[complex],
    initial: np.ndarray,
    max_sweeps: int = MAX_SWEEPS,
    tol: float = TOLERANCE,
) -> np.ndarray:
    """Polish all roots simultaneously with the Aberth-Ehrlich iteration"""
    c = _trim(coeffs)
    descending = c[::-1]
    derivative = np.polyder(descending)
    z = np.array(initial, dtype=complex)
    if z.size != c.size - 1:
        raise ValueError(f"expected {c.size - 1} initial roots, got {z.size}")
    if z.size <= 1:
        return z if z.size == 0 else np.array([-c[0] / c[1]])
    for sweep in range(max_sweeps):
        converged = True
        for i in range(z.size):
            value = np.polyval(descending, z[i])
            if value == 0:
                continue
            slope = np.polyval(derivative, z[i])
            others = np.delete(z, i)
            if np.any(others == z[i]):
                continue
            repulsion = np.sum(1.0 / (z[i] - others))
            denom = slope - value * repulsion
            if denom == 0:
                continue
            delta = value / denom
            z[i] -= delta
            if abs(delta) > tol * max(1.0, abs(z[i])):
                converged = False
        if converged:
            info("converged after %d sweeps", sweep + 1)
            break
    return z


def roots(coeffs: Sequence[complex]) -> np.ndarray:
    """Companion-matrix roots refined by Aberth, in (real, imag) order"""
    start = companion_roots(coeffs)
    if start.size == 0:
        return start
    polished = aberth(coeffs, start)
    return polished[np.lexsort((polished.imag, polished.real))]


def clusters(values: np.ndarray, tol: float) -> list[tuple[int, int]]:
    """Index pairs of roots closer than tol relative to their magnitude"""
    pairs = []
    for i in range(values.size):
        for j in range(i + 1, values.size):
            scale = max(1.0, abs(values[i]), abs(values[j]))
            if abs(values[i] - values[j]) < tol * scale:
                pairs.append((i, j))
    return pairs
