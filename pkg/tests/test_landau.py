import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from sykmon import landau
from sykmon.landau import (
    LandauCoeffs, NoTransitionError, WallGeometry, effective_coeffs, erasure_threshold,
    hp_mutual_information, hp_threshold, line_tension, mutual_information, pinning_field,
)
from sykmon.model import ModelParams

# independent high-precision evaluation (mpmath, 30 digits) of the coefficient map
LAM_MU1 = 0.176776695296636881
LAM_PRIME_MU1_U04 = -0.141421356237309513
H_MU1_G01 = 0.0420448207626857272


def test_coefficients_at_transition():
    c = effective_coeffs(ModelParams.dimensionless(1.0, 0.4, L=4), 0.1)
    assert c.r == 0
    assert c.lam == pytest.approx(LAM_MU1, rel=1e-14)
    assert c.lam_prime == pytest.approx(LAM_PRIME_MU1_U04, rel=1e-14)
    assert c.h == pytest.approx(H_MU1_G01, rel=1e-14)


def test_no_error_no_field():
    assert effective_coeffs(ModelParams.dimensionless(0.6, 0.4, L=4), 0.0).h == 0


@settings(max_examples=100, deadline=None)
@given(mu=st.floats(0.01, 3.0), g=st.floats(0.0, 0.99), U=st.floats(0.0, 0.49))
def test_coefficient_signs(mu, g, U):
    c = effective_coeffs(ModelParams.dimensionless(mu, U, L=4), g)
    assert (c.h == 0) == (g == 0)
    assert (c.r < 0) == (mu < 1)
    assert c.lam > 0 and c.lam_prime <= 0
    assert c.lam + c.lam_prime > 0


def test_field_conversion_round_trip():
    p = ModelParams.dimensionless(0.6, 0.4, L=4)
    assert landau.field_to_gamma(p, landau.gamma_to_field(p, 0.37)) == pytest.approx(0.37, rel=1e-15)


def test_tension_examples():
    assert line_tension(LandauCoeffs(0.0, 1.0, -0.5, 0.0)) == 0
    h = 0.3
    assert line_tension(LandauCoeffs(0.0, 1.0, -0.5, h)) == pytest.approx((math.pi - 2) * h, rel=1e-15)
    assert line_tension(LandauCoeffs(-1.0, 2.0, -1.0, 0.0)) == pytest.approx(math.pi / 8, rel=1e-15)


def test_tension_requires_negative_anisotropy():
    with pytest.raises(ValueError):
        line_tension(LandauCoeffs(-1.0, 1.0, 0.0, 0.0))


def test_symmetric_phase_scaling_form():
    c = LandauCoeffs(0.25, 1.0, -0.5, 0.1)
    assert landau.symmetric_phase_tension(c) == pytest.approx(0.2)
    assert landau.symmetric_phase_tension(c, prefactor=3.0) == pytest.approx(0.6)
    with pytest.raises(ValueError):
        landau.symmetric_phase_tension(LandauCoeffs(-0.1, 1.0, -0.5, 0.1))


def test_wall_free_energies():
    g = WallGeometry(T_h=2.0, N_flavor=5.0)
    assert landau.wall_free_energy("a", 0.0, 1.0, 0.3, g) == 0
    assert landau.wall_free_energy("b", 0.0, 1.0, 0.3, g) == 0
    assert landau.wall_free_energy("b", 3.0, 0.5, 0.3, g) < 0          # h T_h > sigma
    diff = landau.wall_free_energy("a", 3.0, 0.5, 0.3, g) - landau.wall_free_energy("b", 3.0, 0.5, 0.3, g)
    assert diff == pytest.approx(5.0 * 0.3 * 2.0 * 3.0)


def test_pinning_field_values():
    s, T = 0.8, 2.0
    assert pinning_field(WallGeometry(T_h=T, a=2 / 3), s) == pytest.approx(s / (2 * T), rel=1e-15)
    assert pinning_field(WallGeometry(T_h=T, a=1.0), s) == pytest.approx(s / T)
    assert pinning_field(WallGeometry(T_h=T, a=0.5 + 1e-9), s) < 1e-8
    with pytest.raises(NoTransitionError):
        pinning_field(WallGeometry(T_h=T, a=0.5), s)


def test_erasure_threshold_examples():
    assert erasure_threshold(0.0, 1.0, 1.0, 0.3) == (0.35, True)
    assert erasure_threshold(1.0, 1.0, 1.0, 0.3) == (0.0, False)      # raw root is -eta
    th = erasure_threshold(0.5, 1.0, 1.0, 0.0)
    assert th.e_c == pytest.approx(1 / 3, rel=1e-15) and th.in_range
    with pytest.raises(ZeroDivisionError):
        erasure_threshold(2.0, 1.0, 1.0, 0.0)


def test_vanishing_field_stays_in_range():
    # the raw root can land one ulp above the zero-field value
    for fn, top in ((erasure_threshold, (1 - 0.017058492996131762) / 2),
                    (hp_threshold, 1 - 0.017058492996131762)):
        th = fn(1.4750892600228986e-117, 1.0, 2.75, 0.017058492996131762)
        assert th.in_range and th.e_c <= top


def test_hp_threshold_examples():
    assert hp_threshold(0.0, 1.0, 1.0, 0.2) == (0.8, True)
    th = hp_threshold(1.0, 1.0, 1.0, 0.2)
    assert th.e_c == pytest.approx(0.6, rel=1e-15) and th.in_range
    g = WallGeometry(T_h=1.0, eta=0.2, L=10.0, N_flavor=2.0)
    assert hp_mutual_information(0.3, g, 1.0, 2.0) == pytest.approx(2 * 2.0 * 1.0 * 0.2 * 10.0)


def _mi_geom(T_h, eta, N=3.0, L=7.0):
    return WallGeometry(T_h=T_h, eta=eta, L=L, N_flavor=N)


@settings(max_examples=200, deadline=None)
@given(sigma=st.floats(0.05, 5.0), ratio=st.floats(0.0, 0.95), eta=st.floats(0.0, 0.9),
       T_h=st.floats(0.1, 5.0))
def test_mutual_information_continuity(sigma, ratio, eta, T_h):
    h = ratio * sigma * (1 - eta) / T_h          # keeps e_c in range
    g = _mi_geom(T_h, eta)
    e_c = erasure_threshold(h, T_h, sigma, eta).e_c
    e_s = landau.upper_erasure_point(h, T_h, sigma, eta)
    mid = lambda e: g.N_flavor * (sigma * (eta + 2 * e - 1) + h * T_h * (1 - e)) * g.L
    top = 2 * g.N_flavor * sigma * eta * g.L
    assert abs(mid(e_c)) <= 1e-12 * max(1.0, top)
    assert mutual_information(e_c, g, sigma, h) == 0
    if 0 < e_s < 1:
        assert abs(mid(e_s) - top) <= 1e-12 * max(1.0, top)
        assert abs(mutual_information(e_s, g, sigma, h) - top) <= 1e-12 * max(1.0, top)


@settings(max_examples=200, deadline=None)
@given(sigma=st.floats(0.05, 5.0), ratio=st.floats(0.0, 0.95), eta=st.floats(0.0, 0.9),
       T_h=st.floats(0.1, 5.0))
def test_hp_mutual_information_continuity(sigma, ratio, eta, T_h):
    h = ratio * 2 * sigma * (1 - eta) / T_h
    g = _mi_geom(T_h, eta)
    e_c = hp_threshold(h, T_h, sigma, eta).e_c
    mid = lambda e: g.N_flavor * (2 * sigma * (eta + e - 1) + h * T_h * (1 - e)) * g.L
    assert abs(mid(e_c)) <= 1e-12 * max(1.0, g.N_flavor * sigma * g.L)
    assert hp_mutual_information(e_c, g, sigma, h) == 0
    # at h = h** the linear branch is flat at its saturated value
    hss = 2 * sigma / T_h
    top = 2 * g.N_flavor * sigma * eta * g.L
    assert abs(hp_mutual_information(0.4, g, sigma, hss * (1 - 1e-15)) - top) <= 1e-9 * max(1.0, top)


@settings(max_examples=200, deadline=None)
@given(sigma=st.floats(0.05, 5.0), h=st.floats(0.0, 3.0), eta=st.floats(0.0, 0.9),
       T_h=st.floats(0.1, 5.0), k=st.floats(0.01, 100.0), a=st.floats(0.51, 1.0))
def test_scale_covariance(sigma, h, eta, T_h, k, a):
    assume(abs(2 * sigma - h * T_h) > 1e-3 * sigma)
    th1 = erasure_threshold(h, T_h, sigma, eta)
    th2 = erasure_threshold(k * h, T_h, k * sigma, eta)
    assert th1.in_range == th2.in_range
    assert th2.e_c == pytest.approx(th1.e_c, rel=1e-9, abs=1e-12)
    es1 = landau.upper_erasure_point(h, T_h, sigma, eta)
    es2 = landau.upper_erasure_point(k * h, T_h, k * sigma, eta)
    assert es2 == pytest.approx(es1, rel=1e-9, abs=1e-12)
    g = WallGeometry(T_h=T_h, a=a)
    r1 = pinning_field(g, sigma) * T_h / sigma
    r2 = pinning_field(g, k * sigma) * T_h / (k * sigma)
    assert r2 == pytest.approx(r1, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(sigma=st.floats(0.05, 5.0), eta=st.floats(0.0, 0.8), T_h=st.floats(0.1, 5.0),
       frac=st.floats(0.0, 0.99))
def test_pinning_field_inverts_erasure_threshold(sigma, eta, T_h, frac):
    e = frac * (1 - eta) / 2
    h = landau.erasure_pinning_field(e, eta, sigma, T_h)
    assert h == pytest.approx((1 - 2 * e - eta) / (1 - e) * sigma / T_h, rel=1e-14)
    if abs(2 * sigma - h * T_h) > 1e-9:
        assert erasure_threshold(h, T_h, sigma, eta).e_c == pytest.approx(e, abs=1e-10)


def test_threshold_curve_examples():
    p = ModelParams.dimensionless(0.5, 0.4, L=4)
    mus = [0.2, 0.4, 0.6, 0.8, 0.95]
    rows = landau.threshold_curve(mus, 0.2, 0.0, 1.0, p)
    assert all(r["e_c"] == pytest.approx(0.4) and r["in_range"] for r in rows)
    near = landau.threshold_curve([0.999999], 0.0, 0.2, 1.0, p)[0]
    assert near["e_c"] == 0 and not near["in_range"]


def test_threshold_monotone_in_boundary_error():
    p = ModelParams.dimensionless(0.5, 0.4, L=4)
    mus = [0.3, 0.5, 0.7, 0.9]
    gps = [0.0, 0.05, 0.1, 0.2, 0.4, 0.8]
    table = [landau.threshold_curve(mus, 0.1, gp, 2.0, p) for gp in gps]
    for i in range(len(mus)):
        col = [t[i]["e_c"] for t in table]
        assert all(b <= a + 1e-15 for a, b in zip(col, col[1:]))


def test_field_corrected_tension_is_larger():
    p = ModelParams.dimensionless(0.5, 0.4, L=4)
    a = landau.threshold_curve([0.5], 0.0, 0.3, 1.0, p)[0]
    b = landau.threshold_curve([0.5], 0.0, 0.3, 1.0, p, field_corrected=True)[0]
    assert b["sigma"] > a["sigma"]
