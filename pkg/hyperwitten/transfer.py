"""Transfer matrix over one period, quantization condition and low-lying eigenvalues

G0 is the product over k = n..1 of diag(tau_{2k}, 1) M_k at leading order:
the factor 1 + E_r k collected from the amplitude products is set to 1.
It only changes terms by a relative O(E_r) at exponential rate 0, which
never reaches a positive-slope vertex of the Newton polygon.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from . import polygon_solver
from .errors import ConstantTermSurvives
from .log import log_info, log_warning
from .semiclassical import TunnelingData, tunneling_data
from .transseries import TransSeries, TransTerm, clear_denominators, product, rates_close
from .trigpoly import MorseData

logger = logging.getLogger(__name__)

CANCELLATION_TOL = 1e-10
REALITY_TOL = 1e-9


@dataclass(frozen=True)
class TransMatrix2:
    g11: TransSeries
    g12: TransSeries
    g21: TransSeries
    g22: TransSeries

    @classmethod
    def identity(cls) -> TransMatrix2:
        one, zero = TransSeries.constant(1.0), TransSeries()
        return cls(one, zero, zero, one)

    @classmethod
    def diag(cls, a: TransSeries, b: TransSeries) -> TransMatrix2:
        return cls(a, TransSeries(), TransSeries(), b)

    def __matmul__(self, other: TransMatrix2) -> TransMatrix2:
        return TransMatrix2(
            self.g11 * other.g11 + self.g12 * other.g21,
            self.g11 * other.g12 + self.g12 * other.g22,
            self.g21 * other.g11 + self.g22 * other.g21,
            self.g21 * other.g12 + self.g22 * other.g22,
        )

    def trace(self) -> TransSeries:
        return self.g11 + self.g22

    def det(self) -> TransSeries:
        return self.g11 * self.g22 - self.g12 * self.g21

    @property
    def entries(self) -> tuple[TransSeries, ...]:
        return (self.g11, self.g12, self.g21, self.g22)


def tunneling_factor(td: TunnelingData, k: int) -> TransMatrix2:
    """diag(tau_{2k}, 1) M_k"""
    tau_odd_inv = td.tau[2 * k - 2].inverse()
    mu_odd, mu_even = td.mu[2 * k - 2], td.mu[2 * k - 1]
    one = TransSeries.constant(1.0)
    m = TransMatrix2(
        one + tau_odd_inv,
        one + mu_odd * tau_odd_inv,
        one + mu_even * tau_odd_inv,
        one + mu_odd * mu_even * tau_odd_inv,
    )
    return TransMatrix2.diag(TransSeries.of(td.tau[2 * k - 1]), one) @ m


def assemble_G0(td: TunnelingData) -> TransMatrix2:
    g = TransMatrix2.identity()
    for k in range(td.n, 0, -1):
        g = g @ tunneling_factor(td, k)
    return g


def det_closed_form(td: TunnelingData) -> TransSeries:
    """tau_1^-1 tau_2 ... tau_{2n-1}^-1 tau_{2n} (1 - mu_1) ... (1 - mu_{2n})"""
    taus = [
        td.tau[j].inverse() if j % 2 == 0 else td.tau[j] for j in range(len(td.tau))
    ]
    return product([*taus, *(1.0 - TransSeries.of(mu) for mu in td.mu)])


def leading_term_matrix(td: TunnelingData) -> tuple[TransTerm, ...]:
    """Leading terms of the entries of G0, row by row"""
    mus = product(td.mu).terms[0]
    taus = product([t.inverse() for t in td.tau[::2]]).terms[0]
    common = mus * taus
    mu_first_inv = td.mu[0].inverse()
    mu_last_inv = td.mu[-1].inverse()
    tau_last = td.tau[-1]
    return (
        common * mu_first_inv * mu_last_inv * tau_last,
        common * mu_last_inv * tau_last,
        common * mu_first_inv,
        common,
    )


def _constant_scale(parts: Sequence[TransSeries], rate: float) -> float:
    """Largest E_r^0 coefficient at a given rate among the summands of Q"""
    return max(
        (abs(t.coeff) for part in parts for t in part.block(0) if rates_close(t.rate, rate)),
        default=0.0,
    )


def quantization_series(td: TunnelingData, g0: Optional[TransMatrix2] = None) -> TransSeries:
    """Q = 1 - Tr G0 + det G0 = det(G0 - Id) with its E_r^0 block removed

    The E_r^0 block cancels up to rounding; what is left is compared with
    the E_r^0 terms that went into the sum at the same rate.
    """
    log = log_info(logger, "transfer")
    g0 = assemble_G0(td) if g0 is None else g0
    one, trace, det = TransSeries.constant(1.0), g0.trace(), g0.det()
    q = TransSeries([*one, *(-trace), *det], cancel_tol=CANCELLATION_TOL)
    parts = (one, trace, det, g0.g11, g0.g22, g0.g11 * g0.g22, g0.g12 * g0.g21)
    largest = 0.0
    for term in q.block(0):
        scale = _constant_scale(parts, term.rate)
        if abs(term.coeff) > CANCELLATION_TOL * scale:
            raise ConstantTermSurvives(
                f"E_r^0 term {term.coeff:.3g} at rate {term.rate:.6g} survives "
                f"against summands of size {scale:.3g}"
            )
        largest = max(largest, abs(term.coeff))
    if largest:
        log("removed E_r^0 residual of size %.3g", largest)
    q, _ = clear_denominators(q.without_block(0))
    log("quantization series: %d terms, degrees %s", len(q), q.degrees)
    return q


def reduced_quantization_series(td: TunnelingData) -> TransSeries:
    """Q / E_r, the zero mode factored out"""
    return quantization_series(td).divide_by_E()


def _not_real(value: complex) -> bool:
    value = complex(value)
    return abs(value.imag) > REALITY_TOL * abs(value.real)


@dataclass(frozen=True)
class Correction:
    rate: float
    coeff: complex
    hpow: float

    def to_json(self) -> dict[str, Any]:
        value = complex(self.coeff)
        return {"rate": self.rate, "re": value.real, "im": value.imag, "hpow": self.hpow}


@dataclass(frozen=True)
class EigenAsym:
    """lambda ~ prefactor h^hpow exp(-rate/h) + corrections"""

    rate: float
    prefactor: complex
    hpow: float = 1.0
    corrections: tuple[Correction, ...] = ()
    is_zero_mode: bool = False
    caveat: bool = False
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @classmethod
    def zero_mode(cls) -> EigenAsym:
        return cls(rate=0.0, prefactor=0.0, hpow=1.0, is_zero_mode=True)

    @classmethod
    def from_solution(cls, solution: polygon_solver.TransSolution, depth: int) -> EigenAsym:
        first, *rest = solution.levels
        messages = list(solution.warnings)
        value = complex(first.coeff)
        if _not_real(value) or value.real <= 0:
            messages.append(f"prefactor {value:.6g} is not real positive")
        for index, level in enumerate(rest, start=2):
            if _not_real(level.coeff):
                messages.append(
                    f"correction {index} coefficient {complex(level.coeff):.6g} at rate "
                    f"{level.rate:.6g} is not real"
                )
        return cls(
            rate=first.rate,
            prefactor=value,
            hpow=1.0 + first.h2_pow / 2,
            corrections=tuple(
                Correction(level.rate, level.coeff, 1.0 + level.h2_pow / 2) for level in rest
            ),
            caveat=depth > 2,
            warnings=tuple(messages),
        )

    def value(self, h: float, depth: Optional[int] = None) -> complex:
        if self.is_zero_mode:
            return 0j
        total = self.prefactor * h**self.hpow * math.exp(-self.rate / h)
        for c in self.corrections[: None if depth is None else max(depth - 1, 0)]:
            total += c.coeff * h**c.hpow * math.exp(-c.rate / h)
        return total

    def to_json(self) -> dict[str, Any]:
        value = complex(self.prefactor)
        return {
            "is_zero_mode": self.is_zero_mode,
            "rate": self.rate,
            "prefactor": {"re": value.real, "im": value.imag},
            "hpow": self.hpow,
            "corrections": [c.to_json() for c in self.corrections],
            "caveat": self.caveat,
            "warnings": list(self.warnings),
        }


def low_lying(md: MorseData, depth: int = polygon_solver.DEFAULT_DEPTH) -> tuple[EigenAsym, ...]:
    """The zero mode and the n - 1 exponentially small eigenvalues, lambda = h E_r"""
    log = log_info(logger, "low_lying")
    warn = log_warning(logger, "low_lying")
    td = tunneling_data(md)
    reduced = reduced_quantization_series(td)
    solutions = polygon_solver.solve(reduced, depth)
    modes = [EigenAsym.from_solution(s, depth) for s in solutions]
    for mode in modes:
        for message in mode.warnings:
            warn(message)
    if len(modes) != md.n - 1:
        warn("found %d nonzero modes for %d minima", len(modes), md.n)
    modes.sort(key=lambda m: -m.rate)
    log("rates %s", [round(m.rate, 9) for m in modes])
    return (EigenAsym.zero_mode(), *modes)
