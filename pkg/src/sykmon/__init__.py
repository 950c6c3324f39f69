"""Large-N saddle-point solver and domain-wall toolkit for the monitored Brownian SYK chain."""
from . import framepot, landau, model, saddle, wkb
from .model import (BoundarySpec, ErrorProfile, Gluing, GreensTensor, ModelParams,
                    SelfEnergy, SiteInterval, TimeGrid, order_parameters, validate)
from .saddle import (Seed, SolverConfig, dyson_inverse, fit_entropy_density,
                     on_shell_action, quasi_entropy, self_energy_update, solve_saddle,
                     symmetric_saddle, zeta_of_mu)

__version__ = "0.1.0"
