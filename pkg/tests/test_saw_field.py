import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sawtrap import saw_field as sf
from sawtrap.errors import DomainError


def layer(**kw):
    base = dict(periods=1, voltages=(0.0, 0.0, 1.0), B0=1.0, gap=0.02, velocity=3000.0)
    base.update(kw)
    return sf.IdtLayer.from_wave_number(50.0, **base)


def test_layer_invariants():
    L = layer()
    assert abs(L.k * L.wavelength - 2 * math.pi) < 1e-12
    for bad in (dict(periods=0), dict(gap=-1.0), dict(index=3), dict(voltages=(1.0, 2.0))):
        with pytest.raises(ValueError):
            layer(**bad)


def test_equal_voltages_cancel():
    L = layer(voltages=(0.7, 0.7, 0.7), periods=3)
    x = np.linspace(0, 0.3, 50)
    # exact zero in exact arithmetic; the bound is roundoff for phases of O(10) rad
    assert np.max(np.abs(sf.potential_finger_sum(L, x, 0.001, 1e-4))) < 1e-14 * 3 * 0.7


def test_decay_far_from_surface():
    L = layer(periods=3, voltages=(0.0, 0.5, 1.0))
    z = 40.0 / L.k
    assert np.max(np.abs(sf.potential_finger_sum(L, np.linspace(0, 1, 20), z, 0.0))) < 1e-15 * 3


def test_finger_sum_matches_closed_form_m3():
    # V0 = V1 = 1, V2 = 0 so the closed form carries M (V2 - V0) B0 = -3
    L = layer(periods=3, voltages=(1.0, 1.0, 0.0))
    rng = np.random.default_rng(0)
    x = rng.uniform(-1, 1, 500)
    z = rng.uniform(0, 0.05, 500)
    t = rng.uniform(0, 1e-3, 500)
    a = sf.potential_finger_sum(L, x, z, t)
    # trig-identity oracle written out independently
    lam = L.wavelength
    b = -3.0 * np.exp(-50.0 * z) * np.cos(50.0 * (x - 2 * lam / 3 - 3000.0 * t))
    env = 3.0 * np.exp(-50.0 * z)
    assert np.max(np.abs(a - b) / env) < 1e-10
    assert np.max(np.abs(sf.potential_closed_form(L, x, z, t) - b) / env) < 1e-12


def test_zero_ubar_gives_zero_field():
    fs = sf.field_closed_form(layer(), 0.3, 0.01, 0.0, u_bar=0.0)
    assert fs.Ex == 0.0 and fs.Ez == 0.0


def test_layer_index_flips_ez():
    L1 = layer(index=1)
    L2 = layer(index=2)
    z = 0.004
    a = sf.field_closed_form(L1, 0.1, z, 0.0)
    b = sf.field_closed_form(L2, 0.1, L2.gap - z, 0.0)
    assert a.Ex == b.Ex
    assert a.Ez == -b.Ez


def test_field_is_minus_gradient_of_finger_sum():
    L = layer(periods=2, voltages=(0.0, 0.0, 1.0))
    h = 1e-6 * L.wavelength
    rng = np.random.default_rng(1)
    for _ in range(20):
        x, z, t = rng.uniform(0, 0.2), rng.uniform(0.002, 0.018), rng.uniform(0, 1e-4)
        gx = (sf.potential_finger_sum(L, x + h, z, t) - sf.potential_finger_sum(L, x - h, z, t)) / (2 * h)
        gz = (sf.potential_finger_sum(L, x, z + h, t) - sf.potential_finger_sum(L, x, z - h, t)) / (2 * h)
        fs = sf.field_closed_form(L, x, z, t)
        env = sf.field_envelope(L, z)
        # E = -grad(phi): Ex = +env sin, Ez = +env cos for j = 1
        assert abs(-gx - fs.Ex) / env < 1e-6
        assert abs(-gz - fs.Ez) / env < 1e-6


def test_field_gradient_sign_convention():
    # -d/dx of M u e^{-kz} cos(theta) is +M u k e^{-kz} sin(theta) = Ex;
    # -d/dz gives +M u k e^{-kz} cos(theta) = Ez
    L = layer()
    x, z = 0.037, 0.006
    h = 1e-7
    phi = lambda xx, zz: float(sf.potential_closed_form(L, xx, zz))  # noqa: E731
    fs = sf.field_closed_form(L, x, z)
    assert abs(-(phi(x + h, z) - phi(x - h, z)) / (2 * h) - fs.Ex) < 1e-6 * abs(sf.field_envelope(L, z))
    assert abs(-(phi(x, z + h) - phi(x, z - h)) / (2 * h) - fs.Ez) < 1e-6 * abs(sf.field_envelope(L, z))


def test_domain_error_outside_gap():
    L = layer()
    with pytest.raises(DomainError):
        sf.field_closed_form(L, 0.0, -1e-6)
    with pytest.raises(DomainError):
        sf.field_envelope(L, 0.03)


def test_envelope_values():
    L = layer()
    assert sf.field_envelope(L, 0.0) == pytest.approx(1 * 1.0 * 50.0, rel=1e-14)
    assert abs(sf.field_envelope(L, 0.01) - 50 * math.exp(-0.5)) < 1e-12
    assert abs(50 * math.exp(-0.5) - 30.327) < 1e-3
    assert sf.field_envelope(L, 0.01, u_bar=2.0) == 2 * sf.field_envelope(L, 0.01)
    # cross-check: |E| at the cosine peak equals the envelope
    x_peak = 2 * L.wavelength / 3
    assert abs(sf.field_closed_form(L, x_peak, 0.01).magnitude - sf.field_envelope(L, 0.01)) < 1e-12


def test_harmonicity_bound_and_zero():
    L = layer(periods=3, voltages=(0.0, 0.3, 1.0))
    g = np.array([[x, z] for x in np.linspace(0, 0.1, 6) for z in np.linspace(0.002, 0.015, 5)])
    assert sf.check_harmonicity(L, g) < 1e-4 * L.k**2 * L.B0
    assert sf.check_harmonicity(layer(B0=0.0), g) == 0.0


def test_harmonicity_second_order():
    L = layer()
    g = np.array([[0.01, 0.005], [0.05, 0.01], [0.07, 0.003]])
    lam = L.wavelength
    errs = [sf.check_harmonicity(L, g, h=lam / n) for n in (50, 100, 200)]
    r1, r2 = errs[0] / errs[1], errs[1] / errs[2]
    assert 3.5 < r1 < 4.5 and 3.5 < r2 < 4.5


def test_harmonicity_grid_must_clear_surface():
    with pytest.raises(DomainError):
        sf.check_harmonicity(layer(), np.array([[0.0, 1e-7]]))


@settings(max_examples=30)
@given(st.floats(-1, 1), st.floats(0, 0.02), st.floats(0, 1e-3))
def test_periodicity_and_travelling_wave(x, z, t):
    L = layer(periods=2, voltages=(0.0, 0.0, 1.0))
    a = sf.field_closed_form(L, x, z, t)
    b = sf.field_closed_form(L, x + L.wavelength, z, t)
    env = abs(sf.field_envelope(L, z))
    assert abs(a.Ex - b.Ex) <= 1e-12 * env and abs(a.Ez - b.Ez) <= 1e-12 * env
    d = 1e-5
    c = sf.field_closed_form(L, x - L.velocity * d, z, t - d)
    assert abs(a.Ex - c.Ex) <= 1e-9 * env and abs(a.Ez - c.Ez) <= 1e-9 * env
