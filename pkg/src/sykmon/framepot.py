"""Frame potential of the Brownian SYK circuit ensemble.

F^(m)(t) = sum_{k=0}^m m!^2 / (k! (m-k)!^2) x^(m-k),  x = exp(NL (log 2 - s t)),
s = J/8 + U/(4q). Evaluated in the log domain so NL up to 10^6 is safe.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.special import gammaln, logsumexp


@dataclass(frozen=True)
class FramePotentialInput:
    m: int
    NL: float
    J: float = 1.0
    U: float = 0.0
    q: int = 4
    t: float = 0.0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("m must be an integer >= 1")
        if self.NL < 1:
            raise ValueError("NL must be >= 1")

    @property
    def rate(self) -> float:
        return self.J / 8 + self.U / (4 * self.q)


def _log_coeffs(m: int) -> np.ndarray:
    k = np.arange(m + 1)
    return 2 * gammaln(m + 1) - gammaln(k + 1) - 2 * gammaln(m - k + 1)


def log_frame_potential(inp: FramePotentialInput, reverse: bool = False) -> float:
    """Natural log of F^(m).

    Each term carries its own exponent (m - k) NL (log 2 - s t), so there is no
    large prefactor to cancel. ``reverse`` sums over j = m - k instead.
    """
    m = int(inp.m)
    expo = inp.NL * (math.log(2) - inp.rate * inp.t)
    lc = _log_coeffs(m)
    k = np.arange(m + 1)
    if reverse:
        terms = lc[m - k] + k * expo
    else:
        terms = lc + (m - k) * expo
    return float(logsumexp(terms))


def log_haar(m: int) -> float:
    return math.lgamma(m + 1)


def design_time(inp: FramePotentialInput, epsilon: float) -> float:
    """Smallest t with log F <= log m! + epsilon (bisection, 1e-9 relative)."""
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    target = log_haar(int(inp.m)) + epsilon
    f = lambda t: log_frame_potential(_at(inp, t)) - target
    if f(0.0) <= 0:
        return 0.0
    hi = math.log(2) / inp.rate
    while f(hi) > 0:
        hi *= 2
    return optimize.brentq(f, 0.0, hi, xtol=1e-300, rtol=1e-10, maxiter=1000)


def _at(inp: FramePotentialInput, t: float) -> FramePotentialInput:
    return FramePotentialInput(inp.m, inp.NL, inp.J, inp.U, inp.q, t)
