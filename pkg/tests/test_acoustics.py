import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sawtrap import acoustics as ac
from sawtrap.errors import DomainError

MED = ac.ElasticMedium(kappa=2.0, mu=1.0, rho=1.0)


def test_medium_validation():
    for bad in (dict(kappa=0, mu=1, rho=1), dict(kappa=1, mu=-1, rho=1), dict(kappa=1, mu=1, rho=0)):
        with pytest.raises(ValueError):
            ac.ElasticMedium(**bad)
    assert MED.shear_velocity == 1.0 and MED.longitudinal_velocity == 2.0 and not MED.is_cubic


def test_strain_examples():
    w = np.array([[0, 1.5, -2], [-1.5, 0, 0.3], [2, -0.3, 0]])
    assert np.all(ac.strain_tensor(w) == 0)
    S = ac.strain_tensor(np.diag([0.7, 0, 0]))
    assert S[0, 0] == 0.7 and np.count_nonzero(S) == 1
    g = np.random.default_rng(0).normal(size=(3, 3))
    S = ac.strain_tensor(g)
    assert np.array_equal(S, S.T)
    with pytest.raises(ValueError):
        ac.strain_tensor(np.zeros((2, 2)))


def test_stress_examples():
    assert np.all(ac.isotropic_stress(MED, np.zeros((3, 3))) == 0)
    assert np.array_equal(ac.isotropic_stress(MED, np.eye(3)), (3 * 2.0 + 2 * 1.0) * np.eye(3))
    S = np.zeros((3, 3))
    S[0, 1] = S[1, 0] = 0.25
    T = ac.isotropic_stress(MED, S)
    assert T[0, 1] == 2 * 1.0 * 0.25 and np.all(np.diag(T) == 0)
    bad = np.zeros((3, 3))
    bad[0, 1] = 1.0
    with pytest.raises(DomainError):
        ac.isotropic_stress(MED, bad)


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_stress_linearity(seed, a, b):
    rng = np.random.default_rng(seed)
    S1 = ac.strain_tensor(rng.integers(-8, 8, size=(3, 3)) / 4.0)
    S2 = ac.strain_tensor(rng.integers(-8, 8, size=(3, 3)) / 4.0)
    a, b = round(a * 4) / 4, round(b * 4) / 4  # dyadic scalars keep the arithmetic exact
    lhs = ac.isotropic_stress(MED, a * S1 + b * S2)
    rhs = a * ac.isotropic_stress(MED, S1) + b * ac.isotropic_stress(MED, S2)
    assert np.array_equal(lhs, rhs)


def test_secular_matrix_structure():
    spec = ac.PropagationSpec(theta=0.0, velocity=0.9)
    P = ac.secular_matrix(MED, spec, 0.0)
    assert np.count_nonzero(P - np.diag(np.diag(P))) == 0
    spec = ac.PropagationSpec(theta=0.7, velocity=0.9)
    a, b = ac.secular_matrix(MED, spec, 0.3), ac.secular_matrix(MED, spec, -0.3)
    assert np.array_equal(np.diag(a), np.diag(b))
    assert np.allclose(a[0, 2], -b[0, 2]) and np.allclose(a[1, 2], -b[1, 2])
    assert a[0, 1] == b[0, 1]
    assert np.iscomplexobj(ac.secular_matrix(MED, spec, 0.3 + 0.1j))


def test_secular_matrix_by_hand():
    # kappa=2, mu=1, rho=1, v=0.9, theta=0, q=0.5: l=1, m=0, rho v^2 = 0.81
    P = ac.secular_matrix(MED, ac.PropagationSpec(0.0, 0.9), 0.5)
    ref = np.array([[4 - 0.81 - 0.25, 0, 1.5], [0, -0.81 + 0.75, 0], [1.5, 0, 1.0 + 0.81 - 1]])
    assert np.allclose(P, ref, rtol=0, atol=1e-15)
    # det = P22 (P11 P33 - P13^2) = -0.06 (2.94 * 0.81 - 2.25)
    assert abs(ac.secular_determinant(MED, ac.PropagationSpec(0.0, 0.9), 0.5) - (-0.06 * 0.1314)) < 1e-14


@settings(max_examples=40)
@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0, 2 * math.pi), st.floats(0.05, 3))
def test_coefficients_match_vandermonde_fit(ka, mu, rho, theta, v):
    med = ac.ElasticMedium(ka, mu, rho)
    spec = ac.PropagationSpec(theta, v)
    Q = np.array([0.0, 0.5, 1.0, 1.5])
    dets = [ac.secular_determinant(med, spec, math.sqrt(x)) for x in Q]
    fit = np.linalg.solve(np.vander(Q, 4), dets)
    co = np.array(ac.determinant_coefficients(med, spec))
    scale = max(1.0, np.max(np.abs(co)))
    assert np.max(np.abs(fit - co)) < 1e-9 * scale


def test_leading_coefficient_sign():
    # the q^6 term is +mu^2 (kappa + 2 mu): P22 and P11 P33 contribute (-mu q^2)(-mu q^2)((kappa+2mu) q^2)
    c3 = ac.determinant_coefficients(MED, ac.PropagationSpec())[0]
    assert c3 == 1.0 * 1.0 * 4.0
    big = 1e4
    d = ac.secular_determinant(MED, ac.PropagationSpec(0.4, 0.9), big)
    assert d > 0 and abs(d / big**6 / c3 - 1) < 1e-3


def test_bulk_velocity_roots():
    for v in (MED.shear_velocity, MED.longitudinal_velocity):
        rs = ac.solve_decay_constants(MED, ac.PropagationSpec(0.0, v))
        assert np.min(np.abs(rs.roots)) < 1e-10
        assert abs(ac.secular_determinant(MED, ac.PropagationSpec(0.0, v), 0.0)) < 1e-10
    # P33 vanishes at q=0 at the shear speed and P11 at the longitudinal speed
    assert ac.secular_matrix(MED, ac.PropagationSpec(0.0, 1.0), 0.0)[2, 2] == 0
    assert ac.secular_matrix(MED, ac.PropagationSpec(0.0, 1.0), 0.0)[1, 1] == 0
    assert ac.secular_matrix(MED, ac.PropagationSpec(0.0, 2.0), 0.0)[0, 0] == 0


def test_decay_constants_companion_oracle():
    spec = ac.PropagationSpec(0.0, 0.9)
    rs = ac.solve_decay_constants(MED, spec)
    co = ac.determinant_coefficients(MED, spec)
    assert np.allclose(co, (4.0, -4.71, 1.3566, -0.115159), rtol=0, atol=1e-12)
    Q = np.sort_complex(np.roots(co).astype(complex))
    q_ref = np.sort_complex(np.sqrt(Q))
    assert np.allclose(np.sort_complex(rs.roots), q_ref, atol=1e-6)
    # shear factor mu(1 - q^2) - rho v^2 = 0 gives the repeated q^2 = 0.19
    assert rs.repeated
    assert np.sum(np.abs(rs.roots - math.sqrt(0.19)) < 1e-6) == 2
    assert np.all(rs.residuals <= rs.tol)


def test_decay_below_shear_speed():
    for v in np.linspace(0.05, 0.99, 40):
        rs = ac.solve_decay_constants(MED, ac.PropagationSpec(0.3, v))
        assert np.all(rs.roots.real > 0)
        assert np.all(rs.residuals <= rs.tol)


def test_free_space_potential():
    k, v, B4 = 50.0, 3000.0, 2.0
    assert abs(ac.free_space_potential(B4, k, v, (0.1, 0.2, 2.0))) < 1e-40
    assert ac.free_space_potential(B4, k, v, (0.0, 0.0, 0.0)) == B4
    h = 1e-4 / k
    p = np.array([0.013, 0.021, 0.004])
    f = lambda r: ac.free_space_potential(B4, k, v, tuple(r), 1e-5)  # noqa: E731
    lap = sum(f(p + h * e) + f(p - h * e) - 2 * f(p) for e in np.eye(3)) / h**2
    assert abs(lap) < 1e-4 * k**2 * B4
    lam = 2 * math.pi / k
    shift = math.sqrt(2) * lam / 2  # x and y each move by lam/sqrt2, so (x+y)/sqrt2 moves by lam
    a = f(p)
    b = f(p + np.array([shift, shift, 0]))
    assert abs(a - b) < 1e-12 * B4
    with pytest.raises(DomainError):
        ac.free_space_potential(B4, k, v, (0, 0, -1e-9))


def test_cubic_stiffness():
    cub = ac.ElasticMedium(2.0, 1.0, 1.0, c11=4.0, c12=2.0, c44=1.0)
    c = ac.cubic_stiffness(cub)
    # isotropic limit c11 = kappa + 2mu, c12 = kappa, c44 = mu
    assert np.array_equal(c, ac.isotropic_stiffness(cub))
    assert c[0, 0, 0, 0] == 4.0 and c[0, 0, 1, 1] == 2.0 and c[0, 1, 0, 1] == 1.0 and c[0, 1, 1, 0] == 1.0
    assert np.array_equal(c, c.transpose(1, 0, 2, 3)) and np.array_equal(c, c.transpose(2, 3, 0, 1))
    with pytest.raises(ValueError):
        ac.cubic_stiffness(MED)


def test_isotropic_stiffness_reproduces_stress():
    S = ac.strain_tensor(np.random.default_rng(4).normal(size=(3, 3)))
    T = np.einsum("ijkl,kl->ij", ac.isotropic_stiffness(MED), S)
    assert np.allclose(T, ac.isotropic_stress(MED, S), rtol=1e-14, atol=1e-14)


def test_piezo_residual_static_uniform():
    # zero acceleration, zero Hessians: balance holds trivially
    c = ac.isotropic_stiffness(MED)
    r = ac.piezo_momentum_residual(1.0, c, np.zeros((3, 3, 3)), np.zeros(3), np.zeros((3, 3, 3)), np.zeros((3, 3)))
    assert np.all(r == 0)
    # plane shear wave u_2 = sin(x1 - t c_s): rho u'' = mu u_2,11
    H = np.zeros((3, 3, 3))
    H[1, 0, 0] = -1.0
    r = ac.piezo_momentum_residual(1.0, c, np.zeros((3, 3, 3)), np.array([0.0, -1.0, 0.0]), H, np.zeros((3, 3)))
    assert np.allclose(r, 0.0, atol=1e-15)
