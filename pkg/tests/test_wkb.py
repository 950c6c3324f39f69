import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sykmon import landau
from sykmon.landau import WallGeometry
from sykmon.wkb import (
    ExtendedBranchError, WallPotential, grid_diagonalize, trapped_count, wall_free_energy_wkb,
    wkb_extended_energies, wkb_spectrum, wkb_trapped_energies,
)

# independent evaluations (mpmath, 30 digits)
PLUS_E1_UNIT = 1.40539183320095454          # (1/2)^(1/3) (3 pi/4)^(2/3)
EXT_S1_T10_N3 = 0.544132198049021138        # 0.1 + (3 pi/10)^2 / 2
AIRY_A1 = 2.338107410459767                  # first zero of Ai(-x)


def test_plus_ground_level_value():
    p = WallPotential("PLUS", 1.0, 1.0, 20.0, 5.0)
    assert wkb_trapped_energies(p, 1)[0] == pytest.approx(PLUS_E1_UNIT, rel=1e-14)


def test_plus_level_ratios_follow_closed_form():
    p = WallPotential("PLUS", 0.7, 1.3, 30.0, 5.0)
    e = wkb_trapped_energies(p, 6)
    n = np.arange(1, 7)
    np.testing.assert_allclose(e / e[0], (2 * n - 1) ** (2 / 3), rtol=1e-13)


def test_minus_short_bulk_reduces_to_plus_form():
    T = 1e-10
    m = WallPotential("MINUS", 1.0, 1.0, 20.0, T)
    p = WallPotential("PLUS", 1.0, 1.0, 20.0, T)
    np.testing.assert_allclose(wkb_trapped_energies(m, 3) + 20.0,
                               wkb_trapped_energies(p, 3), rtol=1e-8)


def test_beyond_trapped_count_raises():
    p = WallPotential("PLUS", 1.0, 1.0, 2.0, 5.0)
    with pytest.raises(ExtendedBranchError):
        wkb_trapped_energies(p, trapped_count(p) + 1)


def test_extended_levels():
    p = WallPotential("PLUS", 1.0, 0.01, 10.0, 10.0)
    assert wkb_extended_energies(p, 3)[2] == pytest.approx(EXT_S1_T10_N3, rel=1e-14)
    free = WallPotential("PLUS", 2.0, 0.0, 1.0, 4.0)
    np.testing.assert_allclose(wkb_extended_energies(free, 4),
                               (np.arange(1, 5) * math.pi / 4.0) ** 2 / 4.0, rtol=1e-14)
    m = WallPotential("MINUS", 1.0, 0.01, 10.0, 10.0)
    np.testing.assert_allclose(wkb_extended_energies(p, 5) - wkb_extended_energies(m, 5), 0.2,
                               rtol=1e-12)


def test_spectrum_indexing():
    p = WallPotential("PLUS", 1.0, 1.0, 2.0, 10.0)
    ns = trapped_count(p)
    spec = wkb_spectrum(p, ns + 2)
    assert [b for b, _ in spec] == ["trapped"] * ns + ["extended"] * 2
    assert spec[ns][1] == pytest.approx(wkb_extended_energies(p, 1)[0])
    m = WallPotential("MINUS", 1.0, 1.0, 0.05, 10.0)
    nm = trapped_count(m)
    assert wkb_spectrum(m, nm + 1)[nm][1] == pytest.approx(wkb_extended_energies(m, nm + 1)[nm])


def test_grid_box_limit():
    p = WallPotential("PLUS", 1.0, 0.0, 0.5, 10.0)
    e1 = grid_diagonalize(p, 2000, n_eig=1)[0]
    assert e1 == pytest.approx((math.pi / p.depth) ** 2 / 2, rel=5e-3)


def test_grid_airy_limit():
    p = WallPotential("PLUS", 1.0, 1.0, 20.0, 5.0)
    e1 = grid_diagonalize(p, 4000, n_eig=1)[0]
    assert e1 == pytest.approx(AIRY_A1 * 0.5 ** (1 / 3), rel=1e-2)


def test_grid_needs_resolution():
    with pytest.raises(ValueError):
        grid_diagonalize(WallPotential("PLUS", 1.0, 1.0, 1.0, 1.0), 100)


def test_grid_levels_sorted_and_monotone_in_field():
    lo = grid_diagonalize(WallPotential("PLUS", 1.0, 0.5, 2.0, 6.0), 400)
    hi = grid_diagonalize(WallPotential("PLUS", 1.0, 0.8, 2.0, 6.0), 400)
    assert np.all(np.diff(lo) >= 0)
    assert np.all(hi >= lo)


def test_extended_branch_needs_thin_strip():
    # the closed form drops the strip's share of the phase, so it carries a
    # ((T + T_h)/T)^2 error when the strip is not thin
    p = WallPotential("PLUS", 1.0, 0.05, 1.0, 10.0)
    o = grid_diagonalize(p, 4000, n_eig=15)
    e = wkb_extended_energies(p, 15)
    assert abs(e[-1] / o[-1] - 1.21) < 0.01


@settings(max_examples=40, deadline=None)
@given(kind=st.sampled_from(["PLUS", "MINUS"]), s=st.floats(0.2, 5.0), h=st.floats(0.1, 5.0),
       T_h=st.floats(1.0, 20.0), T=st.floats(0.5, 20.0))
def test_trapped_levels_increase(kind, s, h, T_h, T):
    p = WallPotential(kind, s, h, T_h, T)
    ns = trapped_count(p)
    if ns >= 2:
        assert np.all(np.diff(wkb_trapped_energies(p, ns)) > 0)
    if ns:
        edge = h * T_h if kind == "PLUS" else 0.0
        assert wkb_trapped_energies(p, ns)[-1] <= edge * (1 + 1e-9) + 1e-12


@settings(max_examples=60, deadline=None)
@given(s=st.floats(0.2, 5.0), h=st.floats(0.1, 5.0), T_h=st.floats(0.5, 20.0),
       T1=st.floats(0.1, 50.0), T2=st.floats(0.1, 50.0))
def test_plus_trapped_count_ignores_bulk_depth(s, h, T_h, T1, T2):
    assert trapped_count(WallPotential("PLUS", s, h, T_h, T1)) == \
        trapped_count(WallPotential("PLUS", s, h, T_h, T2))


def test_free_energy_terms():
    p = WallPotential("PLUS", 0.8, 0.3, 2.0, 6.0)
    geom = WallGeometry(T_h=2.0, N_flavor=50.0)
    f = wall_free_energy_wkb(p, 3.0, N_flavor=50.0, oracle_points=800)
    assert f["F_leading"] == landau.wall_free_energy("a", 3.0, 0.8, 0.3, geom)
    f8 = wall_free_energy_wkb(p, 3.0, N_flavor=400.0, oracle_points=800)
    assert f8["subleading"] / f["subleading"] == pytest.approx(2.0, rel=1e-12)
    m = WallPotential("MINUS", 0.8, 0.3, 2.0, 6.0)
    fm = wall_free_energy_wkb(m, 3.0, N_flavor=50.0, oracle_points=800)
    assert fm["F_leading"] == pytest.approx(50 * 0.8 * 3 - 50 * 0.3 * 2 * 3)
    assert fm["F_leading"] == pytest.approx(landau.wall_free_energy("b", 3.0, 0.8, 0.3, geom))


def test_oracle_subleading_has_same_scaling():
    # large N: the N-scaled ground level approaches the Airy value, same N^(1/3) law
    p = WallPotential("PLUS", 1.0, 1.0, 20.0, 5.0)
    a = wall_free_energy_wkb(p, 1.0, N_flavor=1.0)["subleading_oracle"]
    b = wall_free_energy_wkb(p, 1.0, N_flavor=8.0)["subleading_oracle"]
    assert b / a == pytest.approx(2.0, rel=2e-2)
