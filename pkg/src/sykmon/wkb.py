"""Domain-wall worldline as a particle in a piecewise-linear potential.

The wall height y runs from the top edge (y = 0) down to y = -T - T_h, with
hard walls at both ends. H = p^2/(2 sigma) + V(y), where V is linear in the
field strip -T_h < y < 0 and flat below it. PLUS favours the wall in the strip
(V = -h y there, h T_h below), MINUS disfavours it (V = h y, -h T_h below).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla
from scipy import optimize


@dataclass(frozen=True)
class WallPotential:
    kind: str
    sigma: float
    h: float
    T_h: float
    T: float

    def __post_init__(self):
        if self.kind not in ("PLUS", "MINUS"):
            raise ValueError("kind must be PLUS or MINUS")
        if min(self.sigma, self.T_h, self.T) <= 0 or self.h < 0:
            raise ValueError("sigma, T_h, T must be > 0 and h >= 0")

    @property
    def depth(self) -> float:
        return self.T + self.T_h

    def __call__(self, y):
        y = np.asarray(y, float)
        s = 1.0 if self.kind == "PLUS" else -1.0
        v = np.where(y > -self.T_h, -s * self.h * y, s * self.h * self.T_h)
        return np.where((y > 0) | (y < -self.depth), np.inf, v)


class ExtendedBranchError(ValueError):
    """Requested level lies above the trapped branch."""


def _plus_trapped(p: WallPotential, n: np.ndarray) -> np.ndarray:
    return (p.h ** 2 / (2 * p.sigma)) ** (1 / 3) * (3 * math.pi * (2 * n - 1) / 4) ** (2 / 3)


def _minus_f(p: WallPotential, n: int) -> float:
    """Solve T sqrt(2 sigma f) + (2/3)(2 sigma/h^2)^(1/2) f^(3/2) = (n - 1/2) pi for f."""
    target = (n - 0.5) * math.pi
    a = p.T * math.sqrt(2 * p.sigma)
    b = 2 / 3 * math.sqrt(2 * p.sigma) / p.h
    phase = lambda f: a * math.sqrt(f) + b * f ** 1.5 - target
    hi = 1.0
    while phase(hi) < 0:
        hi *= 2
    return optimize.brentq(phase, 0.0, hi, xtol=1e-15, rtol=1e-13, maxiter=500)


def trapped_count(p: WallPotential) -> int:
    """n_*: number of levels below the trapping edge."""
    if p.h == 0:
        return 0
    if p.kind == "PLUS":
        # E_n <= h T_h  <=>  (2n - 1) <= (4/(3 pi)) (h T_h)^(3/2) / (h^2 / 2 sigma)^(1/2)
        x = 4 / (3 * math.pi) * (p.h * p.T_h) ** 1.5 / math.sqrt(p.h ** 2 / (2 * p.sigma))
        return int(math.floor((x + 1) / 2 + 1e-12))
    f_edge = p.h * p.T_h
    phase = p.T * math.sqrt(2 * p.sigma * f_edge) + 2 / 3 * math.sqrt(2 * p.sigma) / p.h * f_edge ** 1.5
    return int(math.floor(phase / math.pi + 0.5 + 1e-12))


def wkb_trapped_energies(p: WallPotential, n_max: int) -> np.ndarray:
    """WKB levels E_1..E_{n_max} of the trapped branch."""
    n_star = trapped_count(p)
    if n_max > n_star:
        raise ExtendedBranchError(f"only {n_star} trapped levels, asked for {n_max}")
    n = np.arange(1, n_max + 1)
    if p.kind == "PLUS":
        return _plus_trapped(p, n)
    return np.array([-p.h * p.T_h + _minus_f(p, k) for k in n])


def wkb_extended_energies(p: WallPotential, n_max: int) -> np.ndarray:
    """Box-like levels +/- h T_h + (n pi / T)^2 / (2 sigma), valid well above h T_h."""
    n = np.arange(1, n_max + 1)
    s = 1.0 if p.kind == "PLUS" else -1.0
    return s * p.h * p.T_h + (n * math.pi / p.T) ** 2 / (2 * p.sigma)


def wkb_spectrum(p: WallPotential, n_levels: int) -> list:
    """Lowest ``n_levels`` WKB levels as (branch, E), trapped levels first.

    PLUS trapped levels sit in the strip, so the extended quantum number counts
    from above them. MINUS trapped levels are the lowest states of the bulk box
    itself, so the extended branch keeps the overall level index.
    """
    n_star = min(trapped_count(p), n_levels)
    out = [("trapped", float(e)) for e in
           (wkb_trapped_energies(p, n_star) if n_star else [])]
    ext = wkb_extended_energies(p, n_levels)
    for i in range(n_star, n_levels):
        k = i - n_star if p.kind == "PLUS" else i
        out.append(("extended", float(ext[k])))
    return out


def grid_diagonalize(p: WallPotential, grid_points: int, n_eig: int = None) -> np.ndarray:
    """Eigenvalues of the three-point finite-difference Hamiltonian with Dirichlet walls."""
    if grid_points < 200:
        raise ValueError("grid_points must be >= 200")
    dy = p.depth / (grid_points + 1)
    y = -dy * np.arange(1, grid_points + 1)
    kin = 1.0 / (2 * p.sigma * dy * dy)
    diag = 2 * kin + p(y)
    off = np.full(grid_points - 1, -kin)
    if n_eig is None:
        return sla.eigh_tridiagonal(diag, off, eigvals_only=True)
    return sla.eigh_tridiagonal(diag, off, eigvals_only=True, select="i",
                                select_range=(0, n_eig - 1))


def wall_free_energy_wkb(p: WallPotential, x: float, N_flavor: float = 1.0,
                         oracle_points: int = 4000) -> dict:
    """Leading and subleading wall free energy for separation ``x``.

    With sigma -> N sigma and h -> N h the lowest trapped level of PLUS gives
    the N^(1/3) correction; ``subleading_oracle`` replaces the WKB level by the
    grid ground state of the N-scaled problem.
    """
    if x <= 0:
        raise ValueError("x must be > 0")
    N = N_flavor
    if p.kind == "PLUS":
        lead = N * p.sigma * x
        sub = N ** (1 / 3) * (3 * math.pi / 4) ** (2 / 3) * (p.h ** 2 / (2 * p.sigma)) ** (1 / 3) * x
    else:
        lead = N * p.sigma * x - N * p.h * p.T_h * x
        sub = 0.0
    scaled = WallPotential(p.kind, N * p.sigma, N * p.h, p.T_h, p.T)
    e1 = grid_diagonalize(scaled, oracle_points, n_eig=1)[0]
    if p.kind == "MINUS":
        e1 = e1 + N * p.h * p.T_h      # report the part beyond the -N h T_h x offset
    return {"F_leading": lead, "subleading": sub, "subleading_oracle": e1 * x}
