"""Dense symmetric eigensolver: Householder tridiagonalization, Sturm bisection, inverse iteration

A Jacobi cyclic-rotation solver is kept alongside as an independent reference.
"""
from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from .errors import ConvergenceFailure
from .log import log_info

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps
INVERSE_ITERATIONS = 3
JACOBI_SWEEPS = 100


def householder(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of a tridiagonal matrix similar to the symmetric a"""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    off = np.zeros(max(n - 1, 0))
    for k in range(n - 2):
        u = a[k + 1 :, k].copy()
        norm = math.sqrt(float(np.dot(u, u)))
        if norm == 0.0:
            continue
        if u[0] < 0.0:
            norm = -norm
        u[0] += norm
        half = float(np.dot(u, u)) / 2.0
        v = a[k + 1 :, k + 1 :] @ u / half
        g = float(np.dot(u, v)) / (2.0 * half)
        v -= g * u
        a[k + 1 :, k + 1 :] -= np.outer(v, u) + np.outer(u, v)
        off[k] = -norm
    if n >= 2:
        off[n - 2] = a[n - 1, n - 2]
    return np.diagonal(a).copy(), off


def sturm_count(d: np.ndarray, e: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Number of eigenvalues below each shift in x (LDL^T pivot signs)"""
    x = np.asarray(x, dtype=float)
    tiny = EPS * (np.max(np.abs(d)) + (np.max(np.abs(e)) if e.size else 0.0) + 1.0)
    e2 = e * e
    pivot = d[0] - x
    pivot = np.where(pivot == 0.0, -tiny, pivot)
    count = (pivot < 0).astype(int)
    for i in range(1, d.size):
        pivot = d[i] - x - e2[i - 1] / pivot
        pivot = np.where(np.abs(pivot) < tiny, -tiny, pivot)
        count += pivot < 0
    return count


def gershgorin(d: np.ndarray, e: np.ndarray) -> tuple[float, float]:
    radius = np.zeros_like(d)
    radius[:-1] += np.abs(e)
    radius[1:] += np.abs(e)
    return float(np.min(d - radius)), float(np.max(d + radius))


def bisection(
    d: np.ndarray, e: np.ndarray, indices: np.ndarray, max_iterations: Optional[int] = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenvalues number `indices` (0-based, ascending) with their final brackets"""
    lower, upper = gershgorin(d, e)
    scale = max(abs(lower), abs(upper), 1.0)
    lower -= 2 * EPS * scale
    upper += 2 * EPS * scale
    indices = np.asarray(indices)
    lo = np.full(indices.size, lower)
    hi = np.full(indices.size, upper)
    tolerance = 4 * EPS * scale
    halvings = math.ceil(math.log2((upper - lower) / tolerance)) + 2
    cap = max(10 * d.size, halvings) if max_iterations is None else max_iterations
    for iteration in range(cap):
        width = hi - lo
        if np.all(width <= np.maximum(tolerance, 2 * EPS * np.maximum(np.abs(lo), np.abs(hi)))):
            log_info(logger, "bisection")("converged in %d iterations", iteration)
            return 0.5 * (lo + hi), lo, hi
        mid = 0.5 * (lo + hi)
        above = sturm_count(d, e, mid) > indices
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    raise ConvergenceFailure(f"bisection did not converge in {cap} iterations")


def thomas_solve(d: np.ndarray, e: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve the symmetric tridiagonal system (diagonal d, off-diagonal e)"""
    n = d.size
    tiny = EPS * (np.max(np.abs(d)) + 1.0)
    beta = np.empty(n)
    gamma = np.empty(max(n - 1, 0))
    y = np.empty(n)
    beta[0] = d[0] if abs(d[0]) > tiny else tiny
    y[0] = rhs[0] / beta[0]
    for i in range(1, n):
        gamma[i - 1] = e[i - 1] / beta[i - 1]
        beta[i] = d[i] - e[i - 1] * gamma[i - 1]
        if abs(beta[i]) < tiny:
            beta[i] = tiny
        y[i] = (rhs[i] - e[i - 1] * y[i - 1]) / beta[i]
    x = np.empty(n)
    x[-1] = y[-1]
    for i in range(n - 2, -1, -1):
        x[i] = y[i] - gamma[i] * x[i + 1]
    return x


def rayleigh_refine(d: np.ndarray, e: np.ndarray, shift: float, lo: float, hi: float) -> float:
    """Inverse iteration at a shift; the Rayleigh quotient is kept only inside [lo, hi]"""
    rng = np.random.default_rng(d.size)
    x = rng.standard_normal(d.size)
    for _ in range(INVERSE_ITERATIONS):
        x = thomas_solve(d - shift, e, x)
        x /= np.linalg.norm(x)
    tx = d * x
    tx[:-1] += e * x[1:]
    tx[1:] += e * x[:-1]
    quotient = float(np.dot(x, tx))
    return quotient if lo <= quotient <= hi else shift


def tridiagonal_eigenvalues(
    d: np.ndarray, e: np.ndarray, m: int, refine: bool = True
) -> np.ndarray:
    values, lo, hi = bisection(d, e, np.arange(m))
    if refine:
        values = np.array([rayleigh_refine(d, e, v, l, u) for v, l, u in zip(values, lo, hi)])
    return np.sort(values)


def smallest_eigenvalues(a: np.ndarray, m: int, refine: bool = True) -> np.ndarray:
    """The m smallest eigenvalues of the symmetric matrix a, ascending"""
    n = a.shape[0]
    if not 1 <= m <= n:
        raise ValueError(f"cannot compute {m} eigenvalues of a {n}x{n} matrix")
    if n == 1:
        return np.array([float(a[0, 0])])
    d, e = householder(a)
    return tridiagonal_eigenvalues(d, e, m, refine)


def jacobi_eigenvalues(a: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """All eigenvalues by cyclic Jacobi rotations, ascending"""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    scale = max(float(np.linalg.norm(a)), 1e-300)
    negligible = EPS * EPS * scale
    for _ in range(JACOBI_SWEEPS):
        off = float(np.linalg.norm(a - np.diag(np.diagonal(a))))
        if off <= tol * scale:
            return np.sort(np.diagonal(a).copy())
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= negligible:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, q] = a[q, p] = 0.0
    raise ConvergenceFailure(f"Jacobi rotations did not converge in {JACOBI_SWEEPS} sweeps")
