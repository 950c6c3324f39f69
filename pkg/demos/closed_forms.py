"""Tour of the closed-form side: zeta relation, Landau coefficients, thresholds,
wall spectra and the frame potential. Runs in about a second."""
from sykmon import framepot, landau, wkb
from sykmon.model import ModelParams
from sykmon.saddle import zeta_of_mu

print("order parameter zeta versus measurement rate (U~ = 0.4)")
for g in (0.0, 0.1):
    row = "  ".join(f"{zeta_of_mu(m, g, 0.4):.3f}" for m in (0.2, 0.6, 1.0, 1.5, 3.0))
    print(f"  gamma={g:<4}  mu~ = 0.2 0.6 1.0 1.5 3.0 ->  {row}")
print("  without record loss zeta vanishes above mu~ = 1; with it zeta stays above gamma\n")

p = ModelParams.dimensionless(0.6, 0.4, L=24)
c = landau.effective_coeffs(p, 0.2)
sigma = landau.line_tension(landau.effective_coeffs(p, 0.0))
print(f"Landau coefficients at mu~=0.6, gamma=0.2: r={c.r:.4f} lambda={c.lam:.4f} "
      f"lambda'={c.lam_prime:.4f} h={c.h:.4f}; zero-field tension {sigma:.3f}")
geom = landau.WallGeometry(T_h=1.0, a=2 / 3, eta=0.1, L=24)
h_star = landau.pinning_field(geom, sigma)
print(f"pinning field for a=2/3, T_h=1: h*={h_star:.3f} (gamma'={landau.field_to_gamma(p, h_star):.2f})\n")

print("erasure threshold e_c as the boundary field grows (sigma fixed, eta=0.1)")
for hT in (0.0, 0.25, 0.5, 0.75):
    th = landau.erasure_threshold(hT * sigma, 1.0, sigma, 0.1)
    print(f"  h T_h = {hT:.2f} sigma -> e_c = {th.e_c:.4f}")
print()

pot = wkb.WallPotential("PLUS", 1.0, 1.0, 4.0, 10.0)
grid = wkb.grid_diagonalize(pot, 4000, n_eig=6)
print("wall levels in a field strip: WKB vs grid diagonalization")
for (branch, e), o in zip(wkb.wkb_spectrum(pot, 6), grid):
    print(f"  {branch:<8} {e:8.4f} {o:8.4f}")
print()

inp = framepot.FramePotentialInput(m=2, NL=100, U=0.4)
t_eps = framepot.design_time(inp, 0.01)
print(f"frame potential m=2, NL=100 reaches the Haar value within 0.01 at t = {t_eps:.3f}")
