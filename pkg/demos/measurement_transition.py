"""Half-chain quasi entropy across the measurement transition.

Small chains (L = 4, 6, 8) keep this to a few minutes; the configs in
configs/measurement_transition.json run the L = 8, 10, 12 version."""
from sykmon.model import ErrorProfile, ModelParams, TimeGrid
from sykmon.saddle import fit_entropy_density, half_chain, quasi_entropy

Ls = (4, 6, 8)
for mt in (0.4, 1.5):
    pts = []
    for L in Ls:
        p = ModelParams.dimensionless(mt, 0.4, L=L)
        r = quasi_entropy(p, TimeGrid.from_T(float(L), 0.05), ErrorProfile(), half_chain(L))
        pts.append((L, r.S2))
        print(f"mu~={mt} L={L}: S2 = {r.S2:.4f}  (saddle from {r.twisted.seed})")
    fit = fit_entropy_density(pts)
    print(f"  density {fit.density:.4f} per site, R^2 {fit.r2:.4f}\n")
print("volume law below mu~ = 1, area law above it")
