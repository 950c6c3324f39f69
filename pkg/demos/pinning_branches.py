"""Follow both wall branches of a 2/3 region while boundary record loss grows.

Branch a (walls hugging A) hardly moves; branch b (walls hugging the
complement) pays for the disfavoured strip above A and rises until it crosses.
Takes about three minutes."""
import numpy as np

from sykmon.model import ErrorProfile, ModelParams, SiteInterval, TimeGrid
from sykmon.saddle import Seed, default_seed_library, quasi_entropy

L, A = 12, SiteInterval(0, 8)
p = ModelParams.dimensionless(0.6, 0.4, L=L)
grid = TimeGrid.from_T(6.0, 0.05)
labels = ("WALL_ENCLOSES_A", "WALL_ENCLOSES_COMPLEMENT")
prev = {}
print(" gamma'   branch a   branch b   minimum")
for gp in np.linspace(0.0, 0.9, 10):
    err = ErrorProfile(gamma_boundary=float(gp), T_h=2.0)
    seeds = [s for s in default_seed_library(p, grid, err, A, layer_width=2.0) if s.name in labels]
    seeds = [Seed.array(prev[s.name], label=s.name) if s.name in prev else s for s in seeds]
    r = quasi_entropy(p, grid, err, A, seeds=seeds)
    prev = {c.seed: c.G.equal_time for c in r.candidates if c.converged}
    print(f"  {gp:.1f}   {r.branch(labels[0]):8.3f}   {r.branch(labels[1]):8.3f}   {r.S2:8.3f}")
