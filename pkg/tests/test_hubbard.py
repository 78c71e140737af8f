import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sawtrap import hubbard as hb
from sawtrap.errors import NoBoundaryError

BASE = hb.LatticeGeometry(N=10, width=0.005, z=0.01, k=50.0, B0=100.0, mass=0.1)


def test_critical_ratios():
    assert abs(hb.critical_ratio(1) - 0.085786) < 1e-6
    assert abs(hb.critical_ratio(4) - 0.027864) < 1e-6
    assert abs(hb.critical_ratio(16) - 0.0075775) < 1e-7
    for n in (1, 3, 50):
        assert abs(hb.critical_ratio(n) - (n + 0.5 - math.sqrt(n * (n + 1)))) < 1e-12
    with pytest.raises(ValueError):
        hb.critical_ratio(0)
    with pytest.raises(ValueError):
        hb.critical_ratio(1.5)


def test_critical_ratio_monotone_and_asymptotic():
    f = [hb.critical_ratio(n) for n in range(1, 200)]
    assert all(a > b for a, b in zip(f, f[1:]))
    n = 10**6
    assert abs(hb.critical_ratio(n) * 8 * n - 1) < 1e-5


def test_merge_point_equals_critical_ratio():
    for n in range(1, 17):
        assert abs(hb.boundary_merge_point(n) - hb.critical_ratio(n)) < 1e-12
        assert abs(hb.boundary_discriminant(hb.boundary_merge_point(n), n)) < 1e-12


def test_boundary_examples():
    up, lo = hb.phase_boundary_eps(0.0, 3)
    assert (up, lo) == (3.0, 2.0)
    # n0 = 1, J/U = 0.05: 0.45 +- sqrt(0.0025 - 0.15 + 0.25)
    r = math.sqrt(0.1025)
    up, lo = hb.phase_boundary_eps(0.05, 1)
    assert abs(up - (0.45 + r)) < 1e-15 and abs(lo - (0.45 - r)) < 1e-15
    with pytest.raises(NoBoundaryError):
        hb.phase_boundary_eps(0.1, 1)


def test_lobe_phase():
    assert hb.lobe_phase(0.05, 0.45, 1) == hb.MOTT
    assert hb.lobe_phase(0.05, 0.9, 1) == hb.SUPERFLUID
    assert hb.lobe_phase(0.2, 0.45, 1) == hb.SUPERFLUID


def test_tie_is_mott():
    f = hb.critical_ratio(2)
    assert hb.classify_ratio(f, 2) == hb.MOTT
    assert hb.classify_ratio(math.nextafter(f, 1), 2) == hb.SUPERFLUID


def test_onsite_U():
    assert abs(hb.onsite_U(4 * math.pi * math.sqrt(math.pi / 2)) - 1) < 1e-12
    u = hb.onsite_U(0.1)
    assert abs(u / (4 * math.pi / 0.1 * math.sqrt(math.pi / 2)) - 1) < 1e-8
    assert abs(u - 157.50) < 0.01
    assert abs(hb.onsite_U(0.2) - u / 2) < 1e-12 * u
    with pytest.raises(ValueError):
        hb.onsite_U(0.0)


def test_hopping_direct():
    d = 0.0005 / 1e-3
    ref = d * 100.0 * math.exp(-0.5) * math.exp(-d * d)
    assert abs(hb.hopping_J(BASE) - ref) < 1e-13 * ref
    kin = d * (1 - d * d) / (2 * 0.1) * math.exp(-d * d)
    assert abs(hb.hopping_J(BASE, kinetic=True) - ref - kin) < 1e-13 * ref
    far = hb.with_height(BASE, 20.0)
    assert hb.hopping_J(far) == 0.0
    # Delta -> 0: J vanishes linearly with slope B0 e^{-kz}
    g = hb.LatticeGeometry(N=10**9)
    assert abs(hb.hopping_J(g) / g.delta - 100 * math.exp(-0.5)) < 1e-12


def test_onsite_eps():
    g = hb.with_height(BASE, 0.0)
    assert hb.onsite_eps(g) == 100.0
    assert hb.onsite_eps(g, -100.0) == 0.0
    z = np.linspace(0, 0.02, 30)
    e = [hb.onsite_eps(hb.with_height(BASE, zz)) / hb.onsite_U(0.1) for zz in z]
    assert all(a > b for a, b in zip(e, e[1:]))


def test_J_over_U_decreasing_in_z():
    z = np.linspace(0.0005, 0.02, 40)
    for N in (5, 10, 15):
        g = hb.LatticeGeometry(N=N)
        x = [hb.bose_hubbard_params(hb.with_height(g, zz)).J_over_U for zz in z]
        assert all(a > b for a, b in zip(x, x[1:]))


def test_classification_extremes():
    near = hb.classify_phase(hb.LatticeGeometry(N=5, z=0.0005))
    assert near.phase == hb.SUPERFLUID
    far = hb.classify_phase(hb.LatticeGeometry(N=5, z=1.0))
    assert far.phase == hb.MOTT


def test_default_grid_has_boundary():
    pts = hb.phase_diagram(np.linspace(0.0005, 0.02, 40), range(5, 16))
    phases = {p.phase for p in pts}
    assert phases == {hb.SUPERFLUID, hb.MOTT}


@settings(max_examples=40)
@given(st.floats(1.0, 500.0), st.floats(0.01, 1.0), st.floats(0.1, 10.0), st.floats(0.0, 0.02))
def test_ratio_depends_on_B0_m0_product(B0, m0, s, z):
    a = hb.bose_hubbard_params(hb.LatticeGeometry(B0=B0, mass=m0, z=z)).J_over_U
    b = hb.bose_hubbard_params(hb.LatticeGeometry(B0=B0 * s, mass=m0 / s, z=z)).J_over_U
    assert abs(a - b) <= 1e-12 * abs(a)


def test_product_invariance_with_kinetic_term_and_offset():
    # the kinetic term scales as 1/m0 like U, so the product rule survives it
    a = hb.bose_hubbard_params(hb.LatticeGeometry(B0=100, mass=0.1), kinetic=True).J_over_U
    b = hb.bose_hubbard_params(hb.LatticeGeometry(B0=200, mass=0.05), kinetic=True).J_over_U
    assert abs(a - b) <= 1e-12 * abs(a)
    # a fixed delta_J offset does not rescale with B0 and breaks it
    a = hb.bose_hubbard_params(hb.LatticeGeometry(B0=100, mass=0.1), delta_J=3.0).J_over_U
    b = hb.bose_hubbard_params(hb.LatticeGeometry(B0=200, mass=0.05), delta_J=3.0).J_over_U
    assert abs(a - b) > 1e-6 * abs(a)


def test_thermal_hopping():
    assert hb.thermal_hopping(3.0, 0.0) == 3.0
    assert abs(hb.thermal_hopping(3.0, 1.0) - 3.0 / math.e) < 1e-15


def test_thermal_nesting():
    z = np.linspace(0.0005, 0.02, 40)
    sets = []
    for b in (0.0, 0.1, 1.0, 2.0):
        pts = hb.phase_diagram(z, range(5, 16), beta_DeltaU=b)
        sets.append({(p.z, p.N) for p in pts if p.phase == hb.SUPERFLUID})
    for a, b in zip(sets, sets[1:]):
        assert b < a or (not a and not b)
    assert len(sets[1]) < len(sets[0])


def test_single_point_grid_matches_classify():
    g = hb.LatticeGeometry(N=7, z=0.004)
    (p,) = hb.phase_diagram([0.004], [7], g)
    q = hb.classify_phase(g)
    assert p.phase == q.phase and abs(p.J_over_U - q.J_over_U) < 1e-14 * q.J_over_U
    assert abs(p.eps_over_U - q.eps_over_U) < 1e-14 * q.eps_over_U and p.lobe_phase == q.lobe_phase


def test_single_point_perturbed_matches_classify():
    g = hb.LatticeGeometry(N=7, z=0.004)
    (p,) = hb.phase_diagram([0.004], [7], g, perturb=True, seed=11)
    dJ, dE = hb.draw_perturbations((1, 1), 11)
    q = hb.classify_phase(g, delta_J=dJ[0, 0], delta_eps=dE[0, 0])
    assert abs(p.J_over_U - q.J_over_U) < 1e-13 * abs(q.J_over_U)


def test_seeded_perturbations_deterministic():
    z = np.linspace(0.001, 0.02, 6)
    a = hb.phase_diagram(z, range(5, 9), perturb=True, seed=123)
    b = hb.phase_diagram(z, range(5, 9), perturb=True, seed=123)
    c = hb.phase_diagram(z, range(5, 9), perturb=True, seed=124)
    assert a == b and a != c
    dJ, dE = hb.draw_perturbations((50, 50), 5)
    assert dJ.min() >= -5 and dJ.max() <= 5 and dE.min() >= -100 and dE.max() <= 100


def test_perturbation_only_flips_near_boundary():
    z = np.linspace(0.0005, 0.02, 40)
    clean = hb.phase_diagram(z, range(5, 16))
    noisy = hb.phase_diagram(z, range(5, 16), perturb=True, seed=3)
    f = hb.critical_ratio(1)
    flipped = [c for c, n in zip(clean, noisy) if c.phase != n.phase]
    assert len(flipped) < 0.2 * len(clean)
    # a flip needs the clean ratio within the spread delta_J can cause
    for c in flipped:
        d = hb.LatticeGeometry(N=c.N).delta
        assert abs(c.J_over_U - f) <= d * 5 * math.exp(-d * d) / hb.onsite_U(0.1) + 1e-15


def test_phase_diagram_validation():
    with pytest.raises(ValueError):
        hb.phase_diagram([], [5])
    with pytest.raises(ValueError):
        hb.phase_diagram([0.01], [1])


# ---- Wannier overlaps ----------------------------------------------------------


def test_wannier_quadrature_matches_gaussian_moments():
    for g in (BASE, hb.LatticeGeometry(N=3, B0=7.0, z=0.002)):
        for pair, t, c in [((0, 1), 0.0, 0.0), ((0, 0), 0.0, 0.3), ((2, 3), 1e-5, -0.4)]:
            a = hb.wannier_J_general(g, pair, t, c)
            b = hb.wannier_J_analytic(g, pair, t, c)
            assert abs(a - b) < 1e-9 * max(1.0, abs(b))


def test_wannier_onsite_kinetic_oracle():
    g = hb.LatticeGeometry(B0=0.0, mass=0.1)
    # int exp(-x^2) (1 - x^2) / 2m dx = sqrt(pi) / 2 / 2m
    ref = math.sqrt(math.pi) * 0.5 / (2 * 0.1)
    assert abs(hb.wannier_J_general(g, (0, 0)) - ref) < 1e-10


def test_wannier_vanishes_for_large_separation():
    g = hb.LatticeGeometry(N=2, width=0.1, B0=0.0)
    assert abs(hb.wannier_J_general(g, (0, 1))) < 1e-100


@pytest.mark.xfail(strict=True, reason="simplified hopping form is not within 25% of the Gaussian overlap at the default strip geometry")
def test_wannier_closed_form_within_25_percent():
    q = hb.wannier_J_general(BASE, (0, 1))
    s = hb.hopping_J(BASE)
    assert abs(q - s) <= 0.25 * abs(q)
