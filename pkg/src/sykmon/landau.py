"""Closed-form Z4 effective theory: coefficients, wall tension, pinning and
error-correction thresholds.

All functions are pure. Threshold solvers clamp out-of-range roots and say so
through ``Threshold.in_range`` instead of raising, so sweeps always produce
complete tables.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .model import ModelParams


@dataclass(frozen=True)
class LandauCoeffs:
    r: float
    lam: float
    lam_prime: float
    h: float


@dataclass(frozen=True)
class WallGeometry:
    T_h: float = 1.0
    a: float = 0.5
    eta: float = 0.0
    e: float = 0.0
    L: float = 1.0
    N_flavor: float = 1.0

    def __post_init__(self):
        for name in ("a", "eta", "e"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.T_h < 0:
            raise ValueError("T_h must be >= 0")


class Threshold(NamedTuple):
    e_c: float
    in_range: bool


class NoTransitionError(ValueError):
    pass


def gamma_to_field(params: ModelParams, gamma: float) -> float:
    """h = gamma mu^(7/4) J^(1/4) / 2^(5/4)."""
    return gamma * params.mu ** 1.75 * params.J ** 0.25 / 2 ** 1.25


def field_to_gamma(params: ModelParams, h: float) -> float:
    return h * 2 ** 1.25 / (params.mu ** 1.75 * params.J ** 0.25)


def effective_coeffs(params: ModelParams, gamma: float) -> LandauCoeffs:
    J, mu = params.J, params.mu
    lam = mu ** 2.5 / (4 * math.sqrt(2 * J))
    return LandauCoeffs(r=mu * (mu - J) / 2, lam=lam, lam_prime=-2 * params.U_tilde * lam,
                        h=gamma_to_field(params, gamma))


def line_tension(c: LandauCoeffs, include_field: bool = True) -> float:
    """Perturbative wall tension; the ordering term is present only for r < 0."""
    if c.lam_prime >= 0:
        raise ValueError("anisotropy lambda' must be negative")
    sigma = 0.0
    if c.r < 0:
        stiff = c.lam + c.lam_prime
        if stiff <= 0:
            raise ValueError("lambda + lambda' must be positive in the ordered phase")
        sigma += math.pi * math.sqrt(-c.lam_prime) / 8 * (-c.r / stiff) ** 1.5
    if include_field:
        sigma += (math.pi - 2) * c.h / math.sqrt(-2 * c.lam_prime)
    return sigma


def symmetric_phase_tension(c: LandauCoeffs, prefactor: float = 1.0) -> float:
    """Scaling form prefactor * h / sqrt(r) for r > 0.

    Only the scaling is known; the prefactor is a free, non-quantitative knob.
    """
    if c.r <= 0:
        raise ValueError("symmetric-phase tension needs r > 0")
    return prefactor * c.h / math.sqrt(c.r)


def wall_free_energy(kind: str, x: float, sigma: float, h: float, geom: WallGeometry) -> float:
    """Leading-order wall free energy: N sigma x (a) or N (sigma - h T_h) x (b)."""
    if x < 0:
        raise ValueError("x must be >= 0")
    N = geom.N_flavor
    if kind == "a":
        return N * sigma * x
    if kind == "b":
        return N * sigma * x - N * h * geom.T_h * x
    raise ValueError("kind must be 'a' or 'b'")


def pinning_field(geom: WallGeometry, sigma: float) -> float:
    """h* = ((2a - 1)/a) sigma / T_h; needs a > 1/2."""
    if geom.a <= 0.5:
        raise NoTransitionError("no pinning transition for a <= 1/2")
    return (2 * geom.a - 1) / geom.a * sigma / geom.T_h


def erasure_pinning_field(e: float, eta: float, sigma: float, T_h: float) -> float:
    """Field at which a fixed erased fraction ``e`` sits exactly at threshold."""
    return (1 - 2 * e - eta) / (1 - e) * sigma / T_h


def hp_pinning_field(e: float, eta: float, sigma: float, T_h: float) -> float:
    return 2 * sigma / T_h * (1 - e - eta) / (1 - e)


def erasure_threshold(h: float, T_h: float, sigma: float, eta: float) -> Threshold:
    """Root of h T_h (1 - e) = sigma (1 - 2e - eta), clamped to [0, (1 - eta)/2]."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    hT = h * T_h
    top = (1 - eta) / 2
    if hT == 0:
        return Threshold(top, True)
    if 2 * sigma == hT:
        raise ZeroDivisionError("degenerate threshold equation: 2 sigma = h T_h")
    e_c = (sigma * (1 - eta) - hT) / (2 * sigma - hT)
    if hT > sigma * (1 - eta) or e_c < 0:
        return Threshold(0.0, False)
    # e_c <= top holds exactly once hT <= sigma (1 - eta); only rounding exceeds it
    return Threshold(min(e_c, top), True)


def hp_threshold(h: float, T_h: float, sigma: float, eta: float) -> Threshold:
    """Hayden-Preskill variant: h T_h (1 - e) = 2 sigma (1 - e - eta), clamped to [0, 1 - eta]."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    hT = h * T_h
    top = 1 - eta
    if hT == 0:
        return Threshold(top, True)
    if 2 * sigma == hT:
        raise ZeroDivisionError("degenerate threshold equation: 2 sigma = h T_h")
    e_c = (2 * sigma * (1 - eta) - hT) / (2 * sigma - hT)
    if hT > 2 * sigma * (1 - eta) or e_c < 0:
        return Threshold(0.0, False)
    return Threshold(min(e_c, top), True)


def upper_erasure_point(h: float, T_h: float, sigma: float, eta: float) -> float:
    """e_* from h T_h (1 - e) = sigma (1 - 2e + eta), clamped to [0, 1]."""
    hT = h * T_h
    if 2 * sigma == hT:
        raise ZeroDivisionError("degenerate equation: 2 sigma = h T_h")
    e_s = (sigma * (1 + eta) - hT) / (2 * sigma - hT)
    return min(max(e_s, 0.0), 1.0)


def mutual_information(e: float, geom: WallGeometry, sigma: float, h: float) -> float:
    """Three-branch I2(R; E'B'): 0 below e_c, linear in between, 2 N sigma eta L above e_*."""
    N, L, eta, hT = geom.N_flavor, geom.L, geom.eta, h * geom.T_h
    top = 2 * N * sigma * eta * L
    if hT >= 2 * sigma:
        # the field term dominates for every e: the pinned configuration wins
        return top
    e_c = erasure_threshold(h, geom.T_h, sigma, eta).e_c
    e_s = upper_erasure_point(h, geom.T_h, sigma, eta)
    if e <= e_c:
        return 0.0
    if e >= e_s:
        return top
    return N * (sigma * (eta + 2 * e - 1) + hT * (1 - e)) * L


def hp_mutual_information(e: float, geom: WallGeometry, sigma: float, h: float) -> float:
    """Hayden-Preskill I2: 0 below e_c, linear above, saturating at 2 N sigma eta L once h >= 2 sigma / T_h."""
    N, L, eta, hT = geom.N_flavor, geom.L, geom.eta, h * geom.T_h
    if hT >= 2 * sigma:
        return 2 * N * sigma * eta * L
    e_c = hp_threshold(h, geom.T_h, sigma, eta).e_c
    if e <= e_c:
        return 0.0
    return N * (2 * sigma * (eta + e - 1) + hT * (1 - e)) * L


def threshold_curve(mu_range: Sequence[float], eta: float, gamma_prime: float, T_h: float,
                    params: ModelParams, field_corrected: bool = False) -> list:
    """Erasure threshold versus mu/J at fixed boundary record loss.

    The tension is the zero-field value unless ``field_corrected``.
    """
    rows = []
    for mt in mu_range:
        p = ModelParams.dimensionless(mt, params.U_tilde, L=params.L, J=params.J, q=params.q)
        c = effective_coeffs(p, gamma_prime)
        h = c.h
        sigma = line_tension(c, include_field=False)
        if field_corrected:
            sigma = line_tension(c, include_field=True)
        if h * T_h > 0 and 2 * sigma == h * T_h:
            th = Threshold(0.0, False)
        else:
            th = erasure_threshold(h, T_h, sigma, eta)
        rows.append({"mu_tilde": mt, "sigma": sigma, "h": h, "e_c": th.e_c,
                     "in_range": th.in_range})
    return rows
