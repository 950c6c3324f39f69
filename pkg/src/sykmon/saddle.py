"""Large-N saddle points of the replicated monitored Brownian SYK chain.

The self-energy is local in time, so for fixed Sigma the Green's function of a
site solves the first-order boundary-value problem

    (S d/dt - sigma(t)) G(t, t') = delta(t - t'),   gluing rows at t = 0 and t = T,

with S = diag(+1, -1, +1, -1) (x) 1_chain. We solve it with transfer matrices:
the step propagator exp(S sigma_mid dt) carries the admissible subspace of the
initial gluing forward and that of the final gluing backward (re-orthonormalised
by QR every step), and the jump condition G(t'+) - G(t'-) = S fixes the
equal-time value at every node. This is the exact inverse of the discretized
operator in O(Nt) per site; the two-time blocks are rebuilt lazily from the
stored subspaces when requested.
"""
from __future__ import annotations

import json
import logging
import math
import struct
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import linalg as sla
from scipy import optimize, stats

from .model import (CONTOUR_PARITY, CONTOUR_SIGN, IDENTITY_PAIRS, N_CHAIN, N_COMP,
                    N_CONTOUR, BoundarySpec, ErrorProfile, Gluing, GreensTensor,
                    ModelParams, SelfEnergy, SiteInterval, TimeGrid, comp,
                    symmetric_equal_time)

log = logging.getLogger(__name__)

_HALF = N_COMP // 2


class SolverError(RuntimeError):
    pass


class SingularOperatorError(SolverError):
    pass


class NonConvergedError(SolverError):
    def __init__(self, msg, residual=None, iterations=None):
        super().__init__(msg)
        self.residual = residual
        self.iterations = iterations


# ---------------------------------------------------------------- zeta relation

def mu_tilde_of_zeta(zeta: float, gamma: float, U_tilde: float) -> float:
    """Forward map zeta -> mu/J of the broken saddle (zeta in (gamma, 1))."""
    if gamma == 0:
        return (1 + U_tilde * zeta**2) * math.sqrt(1 - zeta**2)
    num = zeta * (1 + U_tilde * zeta**2) * (
        gamma * (1 - zeta**2) + zeta * math.sqrt((1 - zeta**2) * (1 - gamma**2)))
    return num / (zeta**2 - gamma**2)


def zeta_of_mu(mu_tilde: float, gamma: float = 0.0, U_tilde: float = 0.0) -> float:
    """Root zeta of the mu-zeta relation.

    gamma = 0: zeta = 0 for mu_tilde >= 1, else the root of
    mu_tilde = (1 + U_tilde zeta^2) sqrt(1 - zeta^2) in (0, 1).
    gamma > 0: the root in (gamma, 1), found on the relation multiplied
    through by (zeta^2 - gamma^2)/zeta so the bracket has no pole.
    For U_tilde > 1/2 the relation can have several roots; the largest is returned.
    """
    if mu_tilde < 0 or not 0 <= gamma < 1 or U_tilde < 0:
        raise ValueError("need mu_tilde >= 0, 0 <= gamma < 1, U_tilde >= 0")
    if mu_tilde == 0:
        return 1.0
    if gamma == 0:
        if mu_tilde >= 1:
            return 0.0
        f = lambda z: (1 + U_tilde * z * z) * math.sqrt(1 - z * z) - mu_tilde
        lo, hi = 0.0, 1.0
    else:
        def f(z):
            root = math.sqrt(max((1 - z * z) * (1 - gamma * gamma), 0.0))
            # divided by z > 0 so f(gamma) ~ 2 gamma stays representable for tiny gamma
            num = (1 + U_tilde * z * z) * (gamma * (1 - z * z) + z * root)
            return num - mu_tilde * (z * z - gamma * gamma) / z
        lo, hi = gamma, 1.0
    flo, fhi = f(lo), f(hi)
    if not (flo > 0 > fhi):
        raise ValueError("no root in bracket")
    if U_tilde > 0.5:
        # the relation is no longer monotone: bracket the largest root
        zs = np.linspace(lo, hi, 257)
        vals = [f(z) for z in zs]
        k = max(i for i in range(256) if vals[i] > 0 >= vals[i + 1] or vals[i] >= 0 > vals[i + 1])
        lo, hi = zs[k], zs[k + 1]
        if vals[k + 1] == 0:
            return float(hi)
    return optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def decay_rate(params: ModelParams, zeta: float, gamma: float) -> float:
    """Gamma = J + U zeta^2 + gamma mu / zeta (mu at zeta = 0)."""
    if zeta == 0:
        return params.mu
    return params.J + params.U * zeta**2 + gamma * params.mu / zeta


# ---------------------------------------------------------------- closed-form saddle

def symmetric_saddle(params: ModelParams, zeta: float, grid: TimeGrid,
                     gamma: float = 0.0) -> GreensTensor:
    """Translation-invariant replica-diagonal saddle on the grid.

    Each replica carries exp(-Gamma|t|/2)/2 [sgn(t) sz - zeta i sy - (mu/Gamma)(1 + gamma sx) ty]
    with sigma matrices on the contour pair and tau on the chains. zeta = 0 gives
    the symmetric solution (decay mu/2, gamma terms dropped).
    """
    if not 0 <= zeta < 1:
        raise ValueError("zeta must lie in [0, 1)")
    sx = np.array([[0, 1], [1, 0]], complex)
    isy = np.array([[0, 1], [-1, 0]], complex)
    sz = np.diag([1.0, -1.0]).astype(complex)
    ty = np.array([[0, -1j], [1j, 0]])
    one = np.eye(2)
    if zeta == 0:
        rate, lr, gam = params.mu, 1.0, 0.0
    else:
        rate = decay_rate(params, zeta, gamma)
        lr, gam = params.mu / rate, gamma
    odd = np.kron(sz, one)
    even = -zeta * np.kron(isy, one) - lr * np.kron(one + gam * sx, ty)

    n = grid.n_nodes
    L = params.L
    eq = np.zeros((n, N_COMP, N_COMP), complex)
    blk_eq = 0.5 * even
    for p, _ in IDENTITY_PAIRS:
        s = slice(2 * p, 2 * p + 4)
        eq[:, s, s] = blk_eq
    eq_all = np.broadcast_to(eq, (L,) + eq.shape).copy()
    times = grid.times()

    def build(x):
        tau = times[:, None] - times[None, :]
        env = 0.5 * np.exp(-0.5 * rate * np.abs(tau))
        blk = env[..., None, None] * (np.sign(tau)[..., None, None] * odd + even)
        out = np.zeros((N_COMP, n, N_COMP, n), complex)
        for p, _ in IDENTITY_PAIRS:
            s = slice(2 * p, 2 * p + 4)
            out[s, :, s, :] = blk.transpose(2, 0, 3, 1)
        return out

    return GreensTensor(eq_all, grid.dt, build)


# ---------------------------------------------------------------- error field

def full_grid(grid: TimeGrid, err: ErrorProfile) -> TimeGrid:
    """Bulk grid extended by the record-loss strip above t = T."""
    extra = err.strip_steps(grid.dt)
    return TimeGrid(T=(grid.Nt + extra) * grid.dt, dt=grid.dt, Nt=grid.Nt + extra)


def gamma_field(grid: TimeGrid, err: ErrorProfile, L: int) -> np.ndarray:
    """Record-loss probability on every (site, node) of the extended grid."""
    n = full_grid(grid, err).n_nodes
    g = np.full((L, n), float(err.gamma_bulk))
    g[:, grid.Nt + 1:] = err.gamma_boundary
    return g


# ---------------------------------------------------------------- self-energy

def _sigma_from_equal_time(g: np.ndarray, params: ModelParams, gam: np.ndarray) -> np.ndarray:
    J, U, mu, q = params.J, params.U, params.mu, params.q
    if params.periodic:
        nb = np.roll(g, 1, 0) + np.roll(g, -1, 0)
    else:
        nb = np.zeros_like(g)
        nb[1:] += g[:-1]
        nb[:-1] += g[1:]
    sig = np.zeros_like(g)
    for a in range(N_CHAIN):
        s = slice(a, N_COMP, N_CHAIN)
        blk = J * nb[..., s, s] + U * (2 * g[..., s, s]) ** (q - 1)
        sig[..., s, s] = -0.5 * CONTOUR_PARITY * blk
    for al in range(N_CONTOUR):
        sig[..., comp(al, 0), comp(al, 1)] += -0.5j * mu
        sig[..., comp(al, 1), comp(al, 0)] += 0.5j * mu
    gm = 0.5 * mu * gam
    for p, r in IDENTITY_PAIRS:
        for a in range(N_CHAIN):
            sig[..., comp(p, a), comp(r, a)] -= gm
            sig[..., comp(r, a), comp(p, a)] += gm
        sig[..., comp(p, 0), comp(r, 1)] += 1j * gm
        sig[..., comp(p, 1), comp(r, 0)] -= 1j * gm
        sig[..., comp(r, 0), comp(p, 1)] += 1j * gm
        sig[..., comp(r, 1), comp(p, 0)] -= 1j * gm
    return sig


def self_energy_update(G: GreensTensor, params: ModelParams, err: ErrorProfile,
                       grid: TimeGrid) -> SelfEnergy:
    g = G.equal_time
    gam = gamma_field(grid, err, params.L)
    if g.shape[:2] != gam.shape:
        raise ValueError(f"G has shape {g.shape[:2]}, grid needs {gam.shape}")
    return SelfEnergy(_sigma_from_equal_time(g, params, gam))


# ---------------------------------------------------------------- Dyson solve

def _null4(B: np.ndarray) -> np.ndarray:
    """Orthonormal basis (8x4) of the kernel of the 4x8 gluing block."""
    _, _, vh = np.linalg.svd(B)
    return vh[_HALF:].conj().T


def gluing_rows(tag: Gluing, c: float, flip_second: bool = False) -> np.ndarray:
    """Rows psi^p - c psi^q = 0 for both chains and both pairs of ``tag``."""
    rows = []
    for k, (p, r) in enumerate(tag.pairs()):
        ck = -c if (flip_second and k == 1) else c
        for a in range(N_CHAIN):
            row = np.zeros(N_COMP, complex)
            row[comp(p, a)] = 1.0
            row[comp(r, a)] = -ck
            rows.append(row)
    return np.array(rows)


def boundary_blocks(bc: BoundarySpec):
    """Gluing rows at both edges for every site.

    The final edge uses psi^p = psi^q, the initial edge psi^p = -psi^q, which
    makes every closed contour loop antiperiodic. When a site carries different
    tags at the two edges the four contours form one loop; flipping the sign of
    the initial-edge pair without contour 1 keeps that loop antiperiodic.
    """
    B0, BT = [], []
    for t0, tT in zip(bc.tags0, bc.tagsT):
        BT.append(gluing_rows(tT, 1.0))
        B0.append(gluing_rows(t0, -1.0, flip_second=(t0 is not tT)))
    return np.array(B0), np.array(BT)


@dataclass
class _Transfer:
    """Subspace data from which one site's two-time blocks are rebuilt."""
    W0: np.ndarray      # (L, n, 8, 4) forward-propagated initial kernel
    WT: np.ndarray      # (L, n, 8, 4) backward-propagated final kernel
    R0: np.ndarray      # (L, n-1, 4, 4) forward QR factors
    RT: np.ndarray      # (L, n-1, 4, 4) backward QR factors
    X: np.ndarray       # (L, n, 4, 8) with G(t+, t) = WT X
    Y: np.ndarray       # (L, n, 4, 8) with G(t-, t) = W0 Y


def _dyson_core(sig: np.ndarray, dt: float, B0: np.ndarray, BT: np.ndarray,
                keep: bool = False):
    L, n = sig.shape[:2]
    Nt = n - 1
    A = CONTOUR_SIGN @ (0.5 * (sig[:, 1:] + sig[:, :-1])) * dt
    P = sla.expm(A.reshape(-1, N_COMP, N_COMP)).reshape(L, Nt, N_COMP, N_COMP)
    Pinv = np.linalg.inv(P)

    W0 = np.empty((L, n, N_COMP, _HALF), complex)
    WT = np.empty_like(W0)
    R0 = np.empty((L, Nt, _HALF, _HALF), complex)
    RT = np.empty_like(R0)
    W0[:, 0] = np.array([_null4(b) for b in B0])
    WT[:, -1] = np.array([_null4(b) for b in BT])
    for j in range(Nt):
        W0[:, j + 1], R0[:, j] = np.linalg.qr(P[:, j] @ W0[:, j])
    for j in range(Nt - 1, -1, -1):
        WT[:, j], RT[:, j] = np.linalg.qr(Pinv[:, j] @ WT[:, j + 1])

    M = np.concatenate([WT, -W0], axis=-1)
    try:
        XY = np.linalg.solve(M, np.broadcast_to(CONTOUR_SIGN, M.shape))
    except np.linalg.LinAlgError as exc:
        raise SingularOperatorError("discretized operator is singular") from exc
    if not np.all(np.isfinite(XY)):
        raise SingularOperatorError("discretized operator is singular")
    X, Y = XY[..., :_HALF, :], XY[..., _HALF:, :]
    g = WT @ X - 0.5 * CONTOUR_SIGN
    g = 0.5 * (g - np.swapaxes(g, -1, -2))

    # log det of the boundary-value operator relative to the free propagation
    C0 = np.array([_null4(w.conj().T) for w in W0[:, 0]])
    ld = np.log(np.diagonal(R0, axis1=-2, axis2=-1)).sum(axis=(-1, -2))
    s1, l1 = np.linalg.slogdet(B0 @ C0)
    s2, l2 = np.linalg.slogdet(BT @ W0[:, -1])
    s3, l3 = np.linalg.slogdet(np.concatenate([C0, W0[:, 0]], axis=-1))
    if np.any(s2 == 0):
        raise SingularOperatorError("gluing conditions are incompatible")
    logdet = ld + np.log(s1) + l1 + np.log(s2) + l2 - np.log(s3) - l3
    tr = _Transfer(W0, WT, R0, RT, X, Y) if keep else None
    return g, logdet, tr


def _two_time_from_transfer(tr: _Transfer, g_eq: np.ndarray, x: int) -> np.ndarray:
    W0, WT, R0, RT, X, Y = tr.W0[x], tr.WT[x], tr.R0[x], tr.RT[x], tr.X[x], tr.Y[x]
    n = W0.shape[0]
    out = np.zeros((n, n, N_COMP, N_COMP), complex)   # [j, k, c, d]
    idx = np.arange(n)
    out[idx, idx] = g_eq[x]
    C = X.copy()          # later times: G(t_j, t_k) = WT_j RT_{j-1}^-1 ... RT_k^-1 X_k
    D = Y.copy()          # earlier times: G(t_j, t_k) = W0_j R0_j^-1 ... R0_{k-1}^-1 Y_k
    for d in range(1, n):
        k = idx[: n - d]
        C = np.linalg.solve(RT[k + d - 1], C[: n - d])
        out[k + d, k] = WT[k + d] @ C
        kk = idx[d:]
        D = np.linalg.solve(R0[kk - d], D[-(n - d):])
        out[kk - d, kk] = W0[kk - d] @ D
    return out.transpose(2, 0, 3, 1)


class DysonSolution(GreensTensor):
    """Green's function returned by :func:`dyson_inverse`, with its log-determinant."""

    def __init__(self, g_eq, dt, logdet, transfer):
        super().__init__(g_eq, dt, lambda x: _two_time_from_transfer(transfer, self.equal_time, x))
        self.logdet = logdet
        self._transfer = transfer


def dyson_inverse(Sigma: SelfEnergy, bc: BoundarySpec, grid: TimeGrid) -> DysonSolution:
    """Exact inverse of the discretized (S d/dt - Sigma) with the gluing rows of ``bc``.

    ``grid`` supplies ``dt``; the node count is taken from ``Sigma``.
    """
    if Sigma.L != bc.L:
        raise ValueError("self-energy and boundary spec disagree on L")
    B0, BT = boundary_blocks(bc)
    g, ld, tr = _dyson_core(Sigma.sigma, grid.dt, B0, BT, keep=True)
    return DysonSolution(g, grid.dt, ld, tr)


# ---------------------------------------------------------------- action

def _trapezoid_weights(n: int, dt: float) -> np.ndarray:
    w = np.full(n, dt)
    w[0] = w[-1] = 0.5 * dt
    return w


def _local_terms(g: np.ndarray, params: ModelParams, gam: np.ndarray) -> np.ndarray:
    """Interaction, measurement and record-loss terms of -I/N per (site, node)."""
    J, U, mu, q = params.J, params.U, params.mu, params.q
    L, n = g.shape[:2]
    F = np.zeros((L, n), complex)
    gnext = np.roll(g, -1, 0)
    for a in range(N_CHAIN):
        s = slice(a, N_COMP, N_CHAIN)
        gg, gn = g[..., s, s], gnext[..., s, s]
        hop = J * gg * gn
        if not params.periodic:
            hop[-1] = 0
        F += (-0.25 * CONTOUR_PARITY * (hop + U / (2 * q) * (2 * gg) ** q)).sum(axis=(-1, -2))
    for al in range(N_CONTOUR):
        F += -0.5j * mu * g[..., comp(al, 0), comp(al, 1)]
    Gt = GreensTensor(g, 1.0)
    for p, r in IDENTITY_PAIRS:
        F += -0.5 * mu * gam * Gt.M(p, r)
    return F


def _action(g, sig, logdet, params, gam, dt) -> complex:
    w = _trapezoid_weights(g.shape[1], dt)
    sg = np.einsum("xjab,xjab->xj", sig, g)
    minus_I = 0.5 * logdet.sum() + ((-0.5 * sg + _local_terms(g, params, gam)) * w).sum()
    return -minus_I


# ---------------------------------------------------------------- solver

@dataclass(frozen=True)
class Seed:
    """Initial guess for the fixed-point iteration.

    kind is one of SYMMETRIC, BROKEN_PLUS, BROKEN_MINUS, DOMAIN_PATTERN,
    CHECKPOINT, ARRAY. DOMAIN_PATTERN takes a boolean (L, n) mask that marks
    twist-paired ("-") cells; ARRAY takes an equal-time tensor directly.
    """
    kind: str = "SYMMETRIC"
    pattern: Optional[np.ndarray] = field(default=None, compare=False, repr=False)
    path: Optional[str] = None
    label: Optional[str] = None

    @property
    def name(self) -> str:
        return self.label or self.kind

    @classmethod
    def symmetric(cls):
        return cls("SYMMETRIC")

    @classmethod
    def broken_plus(cls):
        return cls("BROKEN_PLUS")

    @classmethod
    def broken_minus(cls):
        return cls("BROKEN_MINUS")

    @classmethod
    def domain_pattern(cls, mask, label=None):
        return cls("DOMAIN_PATTERN", pattern=np.asarray(mask, bool), label=label)

    @classmethod
    def checkpoint(cls, path):
        return cls("CHECKPOINT", path=str(path))

    @classmethod
    def array(cls, g, label=None):
        return cls("ARRAY", pattern=np.asarray(g, complex), label=label)


@dataclass(frozen=True)
class SolverConfig:
    """Iteration controls.

    ``anderson_depth`` > 0 accelerates the damped update with Anderson (Pulay)
    extrapolation over that many past iterates; 0 gives plain linear mixing.
    """
    mixing: float = 0.3
    tol: float = 1e-9
    max_iter: int = 500
    seed: Seed = Seed()
    anderson_depth: int = 6

    def __post_init__(self):
        if not 0 < self.mixing <= 1:
            raise ValueError("mixing must lie in (0, 1]")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.anderson_depth < 0:
            raise ValueError("anderson_depth must be >= 0")


@dataclass
class SaddleResult:
    G: DysonSolution
    Sigma: SelfEnergy
    iterations: int
    residual: float
    converged: bool
    action: Optional[float] = None
    action_imag: Optional[float] = None
    seed: str = ""
    wall_time: float = 0.0
    grid: Optional[TimeGrid] = None

    @property
    def logdet(self):
        return self.G.logdet


def _paired_equal_time(L, n, pairs, zeta, lr):
    g = np.zeros((L, n, N_COMP, N_COMP), complex)
    for al in range(N_CONTOUR):
        g[..., comp(al, 0), comp(al, 1)] = 0.5j * lr
        g[..., comp(al, 1), comp(al, 0)] = -0.5j * lr
    for p, r in pairs:
        for a in range(N_CHAIN):
            g[..., comp(r, a), comp(p, a)] = 0.5 * zeta
            g[..., comp(p, a), comp(r, a)] = -0.5 * zeta
    return g


def _seed_scales(params: ModelParams, gamma: float):
    z = zeta_of_mu(params.mu_tilde, gamma, params.U_tilde)
    if z < 0.3 or z >= 1:
        # symmetric phase: still start from a visibly ordered guess
        return 0.5, math.sqrt(1 - 0.25)
    return z, min(params.mu / decay_rate(params, z, gamma), 1.0)


def seed_equal_time(seed: Seed, params: ModelParams, err: ErrorProfile, n: int) -> np.ndarray:
    L = params.L
    if seed.kind == "SYMMETRIC":
        return symmetric_equal_time(L, n)
    z, lr = _seed_scales(params, err.gamma_bulk)
    plus = lambda: _paired_equal_time(L, n, IDENTITY_PAIRS, z, lr)
    minus = lambda: _paired_equal_time(L, n, Gluing.TWIST.pairs(), z, lr)
    if seed.kind == "BROKEN_PLUS":
        return plus()
    if seed.kind == "BROKEN_MINUS":
        return minus()
    if seed.kind == "DOMAIN_PATTERN":
        mask = np.asarray(seed.pattern, bool)
        if mask.shape != (L, n):
            raise ValueError(f"pattern shape {mask.shape} != {(L, n)}")
        return np.where(mask[:, :, None, None], minus(), plus())
    if seed.kind in ("CHECKPOINT", "ARRAY"):
        g = read_checkpoint(seed.path).G if seed.kind == "CHECKPOINT" else seed.pattern
        if g.shape != (L, n, N_COMP, N_COMP):
            raise ValueError(f"seed tensor shape {g.shape} does not match the grid")
        return np.array(g, complex)
    raise ValueError(f"unknown seed kind {seed.kind!r}")


def solve_saddle(params: ModelParams, grid: TimeGrid, err: ErrorProfile,
                 bc: BoundarySpec, cfg: SolverConfig = SolverConfig(),
                 strict: bool = False) -> SaddleResult:
    """Iterate G -> Sigma -> G until the max-norm update drops below ``cfg.tol``.

    The returned G is the exact Dyson solution for the returned Sigma, which in
    turn is the self-energy of the last accepted iterate. Non-convergence is
    reported through ``converged=False`` (or raised when ``strict``).
    """
    t0 = time.perf_counter()
    fg = full_grid(grid, err)
    n = fg.n_nodes
    gam = gamma_field(grid, err, params.L)
    B0, BT = boundary_blocks(bc)
    g = seed_equal_time(cfg.seed, params, err, n)

    hist_x, hist_f = [], []
    best = (np.inf, None)
    res = np.inf
    it = 0
    for it in range(1, cfg.max_iter + 1):
        sig = _sigma_from_equal_time(g, params, gam)
        gn, _, _ = _dyson_core(sig, grid.dt, B0, BT)
        f = gn - g
        res = float(np.abs(f).max())
        if res < best[0]:
            best = (res, g)
        if res < cfg.tol:
            break
        if cfg.anderson_depth == 0:
            g = g + cfg.mixing * f
            continue
        if res > 1e3 * best[0]:
            hist_x.clear()
            hist_f.clear()
        hist_x.append(g.ravel())
        hist_f.append(f.ravel())
        if len(hist_x) > cfg.anderson_depth + 1:
            hist_x.pop(0)
            hist_f.pop(0)
        step = cfg.mixing * f.ravel()
        if len(hist_x) > 1:
            dF = np.diff(np.array(hist_f), axis=0).T
            dX = np.diff(np.array(hist_x), axis=0).T
            coef, *_ = np.linalg.lstsq(dF, f.ravel(), rcond=None)
            step = step - (dX + cfg.mixing * dF) @ coef
        g = (g.ravel() + step).reshape(g.shape)
    converged = res < cfg.tol
    if not converged:
        g = best[1]
    sig = _sigma_from_equal_time(g, params, gam)
    G = dyson_inverse(SelfEnergy(sig), bc, fg)
    resid = float(np.abs(G.equal_time - g).max())
    out = SaddleResult(G=G, Sigma=SelfEnergy(sig), iterations=it, residual=resid,
                       converged=converged and resid < cfg.tol, seed=cfg.seed.name,
                       grid=fg)
    if out.converged:
        a = _action(G.equal_time, sig, G.logdet, params, gam, grid.dt)
        out.action = float(a.real)
        out.action_imag = float(a.imag)
    out.wall_time = time.perf_counter() - t0
    log.debug("seed %s: %d iterations, residual %.3e", out.seed, it, resid)
    if strict and not out.converged:
        raise NonConvergedError(f"no convergence from seed {out.seed}", resid, it)
    return out


def fixed_point_residual(res: SaddleResult, params: ModelParams, err: ErrorProfile,
                         grid: TimeGrid, bc: BoundarySpec) -> float:
    """max |G - dyson_inverse(self_energy_update(G))| for a returned saddle."""
    sig = self_energy_update(res.G, params, err, grid)
    G2 = dyson_inverse(sig, bc, full_grid(grid, err))
    return float(np.abs(G2.equal_time - res.G.equal_time).max())


def on_shell_action(res: SaddleResult, params: ModelParams, err: ErrorProfile,
                    grid: TimeGrid, allow_unconverged: bool = False) -> float:
    """I/N on the saddle: log-determinant plus the explicit local terms.

    Only differences between runs on the same grid are meaningful.
    """
    if not (res.converged or allow_unconverged):
        raise NonConvergedError("action requested for a non-converged saddle",
                                res.residual, res.iterations)
    gam = gamma_field(grid, err, params.L)
    a = _action(res.G.equal_time, res.Sigma.sigma, res.G.logdet, params, gam, grid.dt)
    return float(a.real)


def imaginary_residue(action_imag: float) -> float:
    """Distance of Im(I/N) from the nearest multiple of pi/2.

    The square root of the determinant (Pfaffian) is defined only up to sign,
    so the imaginary part is meaningful modulo pi/2 per half-log-determinant.
    """
    r = math.remainder(action_imag, math.pi / 2)
    return abs(r)


# ---------------------------------------------------------------- entropy

def boundary_layer_patterns(L: int, n: int, region: SiteInterval, width: int):
    """Masks for the two wall configurations of a twisted region.

    ``enclose_A``: twisted cells only in thin layers of ``width`` nodes at both
    edges above A, bulk untwisted. ``enclose_complement``: bulk twisted, thin
    untwisted layers at both edges above the complement of A.
    """
    width = max(1, min(width, n // 2))
    edge = np.zeros(n, bool)
    edge[:width] = True
    edge[-width:] = True
    inA = np.zeros(L, bool)
    if region is not None and region.length:
        inA[region.sites(L)] = True
    enclose_A = inA[:, None] & edge[None, :]
    enclose_comp = ~((~inA)[:, None] & edge[None, :])
    return enclose_A, enclose_comp


def default_seed_library(params: ModelParams, grid: TimeGrid, err: ErrorProfile,
                         region: Optional[SiteInterval], layer_width: Optional[float] = None):
    """SYMMETRIC, BROKEN_PLUS, BROKEN_MINUS and the two boundary-layer domain seeds."""
    n = full_grid(grid, err).n_nodes
    width = int(round((layer_width or 1.0 / params.J) / grid.dt))
    pa, pb = boundary_layer_patterns(params.L, n, region, width)
    return [Seed.symmetric(), Seed.broken_plus(), Seed.broken_minus(),
            Seed.domain_pattern(pa, label="WALL_ENCLOSES_A"),
            Seed.domain_pattern(pb, label="WALL_ENCLOSES_COMPLEMENT")]


@dataclass
class EntropyResult:
    S2: float
    per_saddle_actions: list
    untwisted_actions: list
    twisted: Optional[SaddleResult] = None
    untwisted: Optional[SaddleResult] = None
    candidates: list = field(default_factory=list)

    def branch(self, label: str) -> Optional[float]:
        """N_flavor-scaled entropy of the saddle reached from seed ``label``."""
        for rec in self.per_saddle_actions:
            if rec["seed"] == label and rec["converged"]:
                return rec["S2"]
        return None


def _run_seeds(params, grid, err, bc, cfg, seeds):
    out = []
    for s in seeds:
        r = solve_saddle(params, grid, err, bc, _with_seed(cfg, s))
        out.append(r)
    return out


def _with_seed(cfg: SolverConfig, seed: Seed) -> SolverConfig:
    return SolverConfig(mixing=cfg.mixing, tol=cfg.tol, max_iter=cfg.max_iter,
                        seed=seed, anderson_depth=cfg.anderson_depth)


def quasi_entropy(params: ModelParams, grid: TimeGrid, err: ErrorProfile,
                  A: Optional[SiteInterval], cfg: SolverConfig = SolverConfig(),
                  seeds: Optional[Sequence[Seed]] = None,
                  untwisted_seeds: Optional[Sequence[Seed]] = None,
                  bc_twisted: Optional[BoundarySpec] = None,
                  bc_untwisted: Optional[BoundarySpec] = None) -> EntropyResult:
    """Second quasi-Rényi entropy of region ``A`` from twisted and untwisted saddles.

    S2 = N_flavor (min over twisted saddles - min over untwisted saddles).
    ``seeds`` defaults to :func:`default_seed_library`; every converged twisted
    candidate is reported so that first-order branch crossings can be tracked.
    """
    L = params.L
    if A is not None and A.length > L:
        raise ValueError("|A| exceeds L")
    bc_u = bc_untwisted or BoundarySpec.untwisted(L)
    bc_t = bc_twisted or BoundarySpec.twisted(L, A)
    useeds = list(untwisted_seeds or [Seed.symmetric(), Seed.broken_plus()])
    tseeds = list(seeds or default_seed_library(params, grid, err, A))

    ures = _run_seeds(params, grid, err, bc_u, cfg, useeds)
    if bc_t.tags0 == bc_u.tags0 and bc_t.tagsT == bc_u.tagsT:
        tres = ures          # no twisted site: the two computations coincide
        tseeds = useeds
    else:
        tres = _run_seeds(params, grid, err, bc_t, cfg, tseeds)

    uconv = [r for r in ures if r.converged]
    tconv = [r for r in tres if r.converged]
    if not uconv or not tconv:
        which = "untwisted" if not uconv else "twisted"
        raise NonConvergedError(f"every {which} seed failed to converge",
                                min(r.residual for r in (ures if not uconv else tres)), None)
    ubest = min(uconv, key=lambda r: r.action)
    tbest = min(tconv, key=lambda r: r.action)
    N = params.N_flavor
    recs = [{"seed": r.seed, "action": r.action, "converged": r.converged,
             "iterations": r.iterations, "residual": r.residual,
             "S2": N * (r.action - ubest.action) if r.converged else None}
            for r in tres]
    urecs = [{"seed": r.seed, "action": r.action, "converged": r.converged,
              "iterations": r.iterations, "residual": r.residual} for r in ures]
    return EntropyResult(S2=N * (tbest.action - ubest.action), per_saddle_actions=recs,
                         untwisted_actions=urecs, twisted=tbest, untwisted=ubest,
                         candidates=tres)


def half_chain(L: int) -> SiteInterval:
    return SiteInterval(0, L // 2)


# ---------------------------------------------------------------- fits

@dataclass
class DensityFit:
    density: float
    intercept: float
    r2: float
    stderr: float


def fit_entropy_density(points: Sequence, mode: str = "linear") -> DensityFit:
    """Least-squares line S2 = density * L + intercept over (L, S2) points."""
    if mode != "linear":
        raise ValueError("only the linear mode is available")
    pts = np.asarray(points, float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise ValueError("need at least 3 (L, S2) points")
    if len(np.unique(pts[:, 0])) < pts.shape[0]:
        raise ValueError("degenerate abscissae: L values must be distinct")
    lr = stats.linregress(pts[:, 0], pts[:, 1])
    r2 = 1.0 if np.ptp(pts[:, 1]) == 0 and lr.slope == 0 else lr.rvalue ** 2
    return DensityFit(float(lr.slope), float(lr.intercept), float(r2), float(lr.stderr))


def fit_through_origin(x: Sequence[float], y: Sequence[float]):
    """Slope and R^2 (uncentered) of y = slope * x."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    slope = float(x @ y / (x @ x))
    ss_res = float(((y - slope * x) ** 2).sum())
    ss_tot = float((y ** 2).sum())
    return slope, 1.0 - ss_res / ss_tot


# ---------------------------------------------------------------- checkpoints

CHECKPOINT_MAGIC = b"SYKM"
CHECKPOINT_VERSION = 1


@dataclass
class Checkpoint:
    header: dict
    G: np.ndarray
    Sigma: np.ndarray


def write_checkpoint(path, G: np.ndarray, Sigma: np.ndarray, header: dict) -> None:
    """Binary dump: magic, u32 version, u32-length JSON header, then G and Sigma
    as little-endian float64 (re, im) pairs, site-major."""
    G = np.ascontiguousarray(G, dtype="<c16")
    Sigma = np.ascontiguousarray(Sigma, dtype="<c16")
    hdr = dict(header)
    hdr["shape_G"] = list(G.shape)
    hdr["shape_Sigma"] = list(Sigma.shape)
    blob = json.dumps(hdr, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", CHECKPOINT_VERSION))
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(G.tobytes())
        fh.write(Sigma.tobytes())


def read_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != CHECKPOINT_MAGIC:
        raise ValueError("not a checkpoint file (bad magic)")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {version}")
    (hlen,) = struct.unpack_from("<I", data, 8)
    header = json.loads(data[12:12 + hlen].decode("utf-8"))
    off = 12 + hlen
    shapes = [tuple(header["shape_G"]), tuple(header["shape_Sigma"])]
    arrays = []
    for shp in shapes:
        count = int(np.prod(shp))
        arr = np.frombuffer(data, dtype="<c16", count=count, offset=off).reshape(shp)
        arrays.append(arr.astype(complex))
        off += 16 * count
    if off != len(data):
        raise ValueError("checkpoint payload length mismatch")
    return Checkpoint(header, arrays[0], arrays[1])


def save_result(path, res: SaddleResult, params: ModelParams, grid: TimeGrid,
                err: ErrorProfile, bc: BoundarySpec) -> None:
    header = {"params": params.to_dict(), "grid": grid.to_dict(), "bc": bc.to_dict(),
              "err": err.to_dict(), "iterations": res.iterations, "residual": res.residual,
              "converged": res.converged, "action": res.action, "seed": res.seed}
    write_checkpoint(path, res.G.equal_time, res.Sigma.sigma, header)
