"""Two-level Stark model of a polar molecule in the SAW field.

Energies in GHz, dipoles in Debye, fields in V/m.  ``conversion`` turns
mu[D] * E[V/m] into GHz; the default is the SI value, see
:mod:`sawtrap.constants`.
"""

from dataclasses import dataclass
import math

import numpy as np

from .constants import DEBYE_VM_TO_GHZ, RAD_S_TO_GHZ


@dataclass(frozen=True)
class MoleculeSpec:
    name: str = "custom"
    dipole: float = 0.167  # Debye
    doublet: float = 0.4  # GHz
    rotational_constant: float = 0.0  # housed only
    J: float = 1.0
    m: int = 1
    Omega: int = 1
    seeker_sign: int = 1
    mass: float = 28.0  # amu
    omega1: float = 0.0

    def __post_init__(self):
        if not self.J > 0:
            raise ValueError("J' must be positive")
        if abs(2 * self.J - round(2 * self.J)) > 1e-12:
            raise ValueError("J' must be an integer or half-integer")
        if self.dipole < 0:
            raise ValueError("|mu| must be non-negative")
        if self.m not in (-1, 0, 1) or self.Omega not in (-1, 0, 1):
            raise ValueError("m and Omega take values in {-1, 0, 1}")
        if self.seeker_sign not in (-1, 1):
            raise ValueError("seeker_sign must be +1 or -1")
        if not self.mass > 0:
            raise ValueError("mass must be positive")

    @property
    def omega2(self):
        return self.omega1 + self.doublet

    @property
    def mean_level(self):
        return self.omega1 + 0.5 * self.doublet


PRESETS = {
    "CO": MoleculeSpec(name="CO", dipole=0.167, doublet=0.4, J=1.0, m=1, Omega=1, mass=28.0),
    "OH": MoleculeSpec(name="OH", dipole=1.67, doublet=1.65, J=1.5, m=1, Omega=1, mass=17.0),
}


def preset(name):
    try:
        return PRESETS[name.upper()]
    except KeyError:
        raise KeyError(f"unknown molecule preset {name!r}; known: {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class StarkLevels:
    upper: np.ndarray
    lower: np.ndarray
    mean: float

    @property
    def gap(self):
        return self.upper - self.lower


def effective_dipole(spec: MoleculeSpec):
    return spec.seeker_sign * spec.dipole * spec.m * spec.Omega / (2.0 * spec.J * (spec.J + 1.0))


def shifted_splitting(spec: MoleculeSpec, k, v):
    """E_Lambda = doublet - kv, with kv (rad/s) converted to GHz."""
    return spec.doublet - k * v * RAD_S_TO_GHZ


def _coupling(spec, envelope, conversion):
    return effective_dipole(spec) * np.asarray(envelope, dtype=float) * conversion


def stark_levels(spec: MoleculeSpec, envelope, E_Lambda=None, conversion=DEBYE_VM_TO_GHZ):
    E = spec.doublet if E_Lambda is None else E_Lambda
    root = np.hypot(0.5 * E, _coupling(spec, envelope, conversion))
    mean = spec.mean_level
    return StarkLevels(mean + root, mean - root, mean)


def stark_shift(spec: MoleculeSpec, envelope, E_Lambda=None, conversion=DEBYE_VM_TO_GHZ):
    """U_j: the branch a given seeker occupies.

    Low-field seekers (seeker_sign = -1) ride the upper branch, whose
    energy grows with field; high-field seekers the lower one.
    """
    lv = stark_levels(spec, envelope, E_Lambda, conversion)
    return lv.upper if spec.seeker_sign < 0 else lv.lower


def _spatial_phase(x, k, wavelength):
    # E_x = e^{-ik(x - 2 lam / 3)}
    return np.exp(-1j * k * (x - 2.0 * wavelength / 3.0))


def rotating_frame_hamiltonian(
    spec: MoleculeSpec, index, envelope, x, k, wavelength, velocity=0.0, conversion=DEBYE_VM_TO_GHZ
):
    """2x2 Hermitian H' in the rotating frame, after the RWA (GHz)."""
    E = shifted_splitting(spec, k, velocity)
    off = (-1) ** index * float(_coupling(spec, envelope, conversion)) * _spatial_phase(x, k, wavelength)
    mean = spec.mean_level
    return np.array([[mean + 0.5 * E, np.conj(off)], [off, mean - 0.5 * E]], dtype=complex)


def rwa_offdiagonal(
    spec: MoleculeSpec, index, envelope, x, t, k, wavelength, velocity, conversion=DEBYE_VM_TO_GHZ
):
    """Lower off-diagonal of H_omega before the RWA, and its split.

    Returns ``(exact, kept, dropped)`` with exact = kept + dropped.  The
    dropped piece carries the fast phase e^{-2ikvt}; ``kept`` is what
    :func:`rotating_frame_hamiltonian` retains.
    """
    g = float(_coupling(spec, envelope, conversion))
    theta = k * (x - 2.0 * wavelength / 3.0 - velocity * t)
    # -2 g E_z/E_bar e^{-ikvt}, with E_z = (-1)^{j-1} E_bar cos(theta)
    exact = (-1) ** index * 2.0 * g * math.cos(theta) * np.exp(-1j * k * velocity * t)
    kept = (-1) ** index * g * _spatial_phase(x, k, wavelength)
    dropped = (-1) ** index * g * np.conj(_spatial_phase(x, k, wavelength)) * np.exp(-2j * k * velocity * t)
    return complex(exact), complex(kept), complex(dropped)
