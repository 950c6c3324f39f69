"""Domain types and index conventions for the monitored Brownian SYK chain.

Layout used everywhere in the package
-------------------------------------
Each site carries 8 fermion components per flavor: four contours
alpha = 0..3 (forward/backward for two replicas) times two chains a = 0 (L), 1 (R).
The component index is ``c = 2*alpha + a``. Two-time objects are flattened
row-major over (alpha, a, j), i.e. flat index ``c * n_nodes + j``.

Contour orientation signs are ``(+1, -1, +1, -1)``; ``CONTOUR_SIGN`` is the
8x8 diagonal matrix S = diag(s_alpha) (x) 1_chain that multiplies the time
derivative.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

N_CONTOUR = 4
N_CHAIN = 2
N_COMP = N_CONTOUR * N_CHAIN

CONTOUR_SIGNS = np.array([1.0, -1.0, 1.0, -1.0])
CONTOUR_SIGN = np.kron(np.diag(CONTOUR_SIGNS), np.eye(N_CHAIN)).astype(complex)

# contour pairings (0-based): identity pairs forward with backward branch of
# the same replica, twist pairs them across replicas
IDENTITY_PAIRS = ((0, 1), (2, 3))
TWIST_PAIRS = ((0, 3), (2, 1))

# (-1)^(alpha+beta) with 1-based contour labels; same parity as 0-based
CONTOUR_PARITY = np.array([[(-1.0) ** (al + be) for be in range(N_CONTOUR)]
                           for al in range(N_CONTOUR)])


def comp(alpha: int, a: int) -> int:
    """Component index of contour ``alpha`` (0-based) and chain ``a`` (0=L, 1=R)."""
    return N_CHAIN * alpha + a


class Gluing(str, enum.Enum):
    IDENTITY = "IDENTITY"
    TWIST = "TWIST"

    def pairs(self):
        return IDENTITY_PAIRS if self is Gluing.IDENTITY else TWIST_PAIRS


# ---------------------------------------------------------------- parameters

@dataclass(frozen=True)
class ModelParams:
    """Couplings and lattice geometry.

    ``U_tilde`` and ``mu_tilde`` are filled from ``U/J`` and ``mu/J`` when
    omitted; when given they must agree with the dimensionful values.
    """
    J: float = 1.0
    U: float = 0.0
    q: int = 4
    mu: float = 0.0
    L: int = 8
    N_flavor: float = 1.0
    periodic: bool = True
    U_tilde: Optional[float] = None
    mu_tilde: Optional[float] = None

    def __post_init__(self):
        if self.U_tilde is None and self.J != 0:
            object.__setattr__(self, "U_tilde", self.U / self.J)
        if self.mu_tilde is None and self.J != 0:
            object.__setattr__(self, "mu_tilde", self.mu / self.J)

    @classmethod
    def dimensionless(cls, mu_tilde: float, U_tilde: float, L: int, J: float = 1.0,
                      **kw) -> "ModelParams":
        return cls(J=J, U=U_tilde * J, mu=mu_tilde * J, L=L,
                   U_tilde=U_tilde, mu_tilde=mu_tilde, **kw)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("J", "U", "q", "mu", "L", "N_flavor", "periodic", "U_tilde", "mu_tilde")}


@dataclass(frozen=True)
class TimeGrid:
    T: float
    dt: float
    Nt: int

    @classmethod
    def from_T(cls, T: float, dt: float) -> "TimeGrid":
        """Grid with ``Nt = round(T/dt)`` steps; ``T`` is reset to ``Nt*dt``."""
        Nt = int(round(T / dt))
        return cls(T=Nt * dt, dt=dt, Nt=Nt)

    @property
    def n_nodes(self) -> int:
        return self.Nt + 1

    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.n_nodes)

    def to_dict(self) -> dict:
        return {"T": self.T, "dt": self.dt, "Nt": self.Nt}


@dataclass(frozen=True)
class ErrorProfile:
    """Record-loss field: ``gamma_bulk`` for t <= T, ``gamma_boundary`` in the
    strip T < t <= T + T_h. ``erasure_region`` lists sites erased at the final edge."""
    gamma_bulk: float = 0.0
    gamma_boundary: float = 0.0
    T_h: float = 0.0
    erasure_region: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "erasure_region", frozenset(int(s) for s in self.erasure_region))

    def erasure_fraction(self, L: int) -> float:
        return len(self.erasure_region) / L

    def strip_steps(self, dt: float) -> int:
        if self.T_h <= 0:
            return 0
        # tolerate T_h being an exact multiple of dt up to rounding
        return int(math.ceil(self.T_h / dt - 1e-9))

    def to_dict(self) -> dict:
        return {"gamma_bulk": self.gamma_bulk, "gamma_boundary": self.gamma_boundary,
                "T_h": self.T_h, "erasure_region": sorted(self.erasure_region)}


@dataclass(frozen=True)
class SiteInterval:
    """Contiguous block of ``length`` sites starting at ``start`` (wraps when periodic)."""
    start: int
    length: int

    def sites(self, L: int) -> list:
        return [(self.start + k) % L for k in range(self.length)]

    def complement(self, L: int) -> "SiteInterval":
        return SiteInterval((self.start + self.length) % L, L - self.length)


@dataclass(frozen=True)
class BoundarySpec:
    """Per-site gluing tags at the initial (``tags0``) and final (``tagsT``) edge."""
    tags0: tuple
    tagsT: tuple
    region: Optional[SiteInterval] = None
    eta: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "tags0", tuple(Gluing(t) for t in self.tags0))
        object.__setattr__(self, "tagsT", tuple(Gluing(t) for t in self.tagsT))

    @property
    def L(self) -> int:
        return len(self.tags0)

    @classmethod
    def untwisted(cls, L: int) -> "BoundarySpec":
        return cls((Gluing.IDENTITY,) * L, (Gluing.IDENTITY,) * L)

    @classmethod
    def twisted(cls, L: int, region: Optional[SiteInterval],
                final_override: Optional[dict] = None) -> "BoundarySpec":
        """Twist ``region`` at both edges; ``final_override`` maps site -> tag at
        the final edge only (used for erased sites)."""
        sites = set(region.sites(L)) if region is not None and region.length > 0 else set()
        tags = tuple(Gluing.TWIST if x in sites else Gluing.IDENTITY for x in range(L))
        tagsT = list(tags)
        for x, t in (final_override or {}).items():
            tagsT[x] = Gluing(t)
        return cls(tags, tuple(tagsT), region=region)

    def twisted_sites(self) -> set:
        return {x for x in range(self.L)
                if self.tags0[x] is Gluing.TWIST or self.tagsT[x] is Gluing.TWIST}

    def to_dict(self) -> dict:
        reg = None if self.region is None else [self.region.start, self.region.length]
        return {"tags0": [t.value for t in self.tags0], "tagsT": [t.value for t in self.tagsT],
                "region": reg, "eta": self.eta}


@dataclass
class ValidationReport:
    ok: bool
    violations: list

    def __bool__(self):
        return self.ok


def validate(params: ModelParams, grid: TimeGrid, err: ErrorProfile,
             bc: BoundarySpec) -> ValidationReport:
    """Collect every violated invariant; never raises."""
    v = []
    if not params.J > 0:
        v.append("J must be > 0")
    if not params.U >= 0:
        v.append("U must be >= 0")
    if not params.mu >= 0:
        v.append("mu must be >= 0")
    if params.q % 2 != 0 or params.q < 4:
        v.append("q must be even >= 4")
    if params.L < 2:
        v.append("L must be >= 2")
    if not params.N_flavor >= 1:
        v.append("N_flavor must be >= 1")
    if params.J > 0:
        for name, red, val in (("U_tilde", params.U_tilde, params.U / params.J),
                               ("mu_tilde", params.mu_tilde, params.mu / params.J)):
            if red is None or abs(red - val) > 1e-12 * max(1.0, abs(val)):
                v.append(f"{name} inconsistent with dimensionful couplings")
    if not grid.dt > 0:
        v.append("dt must be > 0")
    if grid.Nt < 8:
        v.append("Nt must be >= 8")
    if abs(grid.T - grid.Nt * grid.dt) > 1e-12 * max(1.0, abs(grid.T)):
        v.append("T must equal Nt*dt")
    for name, g in (("γ", err.gamma_bulk), ("γ′", err.gamma_boundary)):
        if not 0 <= g < 1:
            v.append(f"{name} must be < 1 and >= 0")
    if err.T_h < 0:
        v.append("T_h must be >= 0")
    if any(s < 0 or s >= params.L for s in err.erasure_region):
        v.append("erasure_region must lie inside the chain")
    if bc.L != params.L or len(bc.tagsT) != params.L:
        v.append("boundary tags must have one entry per site")
    if bc.region is not None:
        r = bc.region
        if not (0 <= r.length <= params.L) or not (0 <= r.start < params.L):
            v.append("region A is not a valid interval")
        elif not params.periodic and r.start + r.length > params.L:
            v.append("region A wraps around an open chain")
        elif bc.L == params.L:
            sites = set(r.sites(params.L)) if r.length else set()
            tw0 = {x for x, t in enumerate(bc.tags0) if t is Gluing.TWIST}
            if tw0 != sites:
                v.append("TWIST sites at the initial edge must equal region A")
    if bc.eta is not None and not 0 <= bc.eta <= 1:
        v.append("eta must lie in [0, 1]")
    return ValidationReport(ok=not v, violations=v)


# ---------------------------------------------------------------- fields

class GreensTensor:
    """Saddle Green's function of every site.

    The equal-time values ``equal_time[x, j]`` (8x8, symmetric limit) are always
    stored. The full two-time matrix of one site is produced on demand by
    ``two_time_builder(x) -> array (8, n, 8, n)`` so that the solver never holds
    all sites' two-time blocks at once.
    """

    def __init__(self, equal_time: np.ndarray, dt: float,
                 two_time_builder: Optional[Callable[[int], np.ndarray]] = None):
        self.equal_time = np.asarray(equal_time, dtype=complex)
        self.dt = float(dt)
        self._builder = two_time_builder

    @property
    def L(self) -> int:
        return self.equal_time.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.equal_time.shape[1]

    def two_time(self, x: int) -> np.ndarray:
        """G[c, j, d, k] = G_cd(t_j, t_k) for site ``x``."""
        if self._builder is None:
            raise ValueError("this tensor carries equal-time data only")
        return self._builder(x)

    def matrix(self, x: int) -> np.ndarray:
        """Two-time block of site ``x`` flattened row-major over (alpha, a, j)."""
        n = N_COMP * self.n_nodes
        return self.two_time(x).reshape(n, n)

    def antisymmetry_residual(self, x: int) -> float:
        g = self.two_time(x)
        return float(np.abs(g + g.transpose(2, 3, 0, 1)).max())

    def M(self, alpha: int, beta: int) -> np.ndarray:
        """Equal-time G_LL + G_RR - i G_LR + i G_RL between contours alpha, beta."""
        g = self.equal_time
        LL = g[..., comp(alpha, 0), comp(beta, 0)]
        RR = g[..., comp(alpha, 1), comp(beta, 1)]
        LR = g[..., comp(alpha, 0), comp(beta, 1)]
        RL = g[..., comp(alpha, 1), comp(beta, 0)]
        return LL + RR - 1j * LR + 1j * RL


class SelfEnergy:
    """Time-local self-energy: Sigma(t, t') = delta(t - t') sigma[x, j]."""

    def __init__(self, sigma: np.ndarray):
        self.sigma = np.asarray(sigma, dtype=complex)

    @property
    def L(self) -> int:
        return self.sigma.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.sigma.shape[1]

    def block_matrix(self, x: int) -> np.ndarray:
        """Dense (alpha, a, j) matrix of site ``x``; zero off the time diagonal."""
        n = self.n_nodes
        out = np.zeros((N_COMP, n, N_COMP, n), dtype=complex)
        j = np.arange(n)
        out[:, j, :, j] = self.sigma[x]
        return out.reshape(N_COMP * n, N_COMP * n)


def symmetric_equal_time(L: int, n_nodes: int) -> np.ndarray:
    """Equal-time values of the zeta = 0 symmetric saddle: G_LR = i/2 on each contour."""
    g = np.zeros((L, n_nodes, N_COMP, N_COMP), dtype=complex)
    for al in range(N_CONTOUR):
        g[..., comp(al, 0), comp(al, 1)] = 0.5j
        g[..., comp(al, 1), comp(al, 0)] = -0.5j
    return g


def order_parameters(G: GreensTensor, n_nodes: Optional[int] = None) -> np.ndarray:
    """Order-parameter field phi[x, j] = (phi1, phi2) relative to the symmetric saddle.

    phi1 = dG^{21}_LL + dG^{43}_LL and phi2 = dG^{41}_LL + dG^{23}_LL
    (1-based contour labels), read from equal-time values.
    """
    g = G.equal_time
    if n_nodes is not None and g.shape[1] != n_nodes:
        raise ValueError(f"tensor has {g.shape[1]} time nodes, grid has {n_nodes}")
    if g.ndim != 4 or g.shape[2:] != (N_COMP, N_COMP):
        raise ValueError("equal-time tensor must have shape (L, n, 8, 8)")
    d = g - symmetric_equal_time(g.shape[0], g.shape[1])
    phi1 = d[..., comp(1, 0), comp(0, 0)] + d[..., comp(3, 0), comp(2, 0)]
    phi2 = d[..., comp(3, 0), comp(0, 0)] + d[..., comp(1, 0), comp(2, 0)]
    return np.stack([phi1.real, phi2.real], axis=-1)
