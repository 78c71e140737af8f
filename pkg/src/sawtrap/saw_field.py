"""Free-space potential and field above a trapping IDT.

Two routes to the same field: the explicit superposition over the three
finger phases and M periods (``potential_finger_sum``), and the closed
form used throughout the trap analysis (``field_closed_form``).  Work is
in the 2D (x, z) reduction, x along the propagation direction.

Heights: ``z`` is measured from the generating layer's own surface, while
``z_abs`` is measured from layer 1, so layer 2 sees z~ = D - z_abs.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import kernels
from .errors import DomainError


@dataclass(frozen=True)
class IdtLayer:
    periods: int = 1
    finger_width: float = 2.0 * math.pi / 50.0 / 6.0
    velocity: float = 3000.0
    voltages: tuple = (1.0, 1.0, 0.0)
    B0: float = 1.0
    index: int = 1
    gap: float = 0.02

    def __post_init__(self):
        if int(self.periods) != self.periods or self.periods < 1:
            raise ValueError("periods (M) must be a positive integer")
        if not self.finger_width > 0:
            raise ValueError("finger_width must be positive")
        if not self.gap > 0:
            raise ValueError("gap (D) must be positive")
        if self.index not in (1, 2):
            raise ValueError("layer index must be 1 or 2")
        if len(self.voltages) != 3:
            raise ValueError("need three finger voltages (V0, V1, V2)")
        object.__setattr__(self, "voltages", tuple(float(v) for v in self.voltages))

    @classmethod
    def from_wave_number(cls, k, **kw):
        return cls(finger_width=2.0 * math.pi / k / 6.0, **kw)

    @property
    def wavelength(self):
        return 6.0 * self.finger_width

    @property
    def k(self):
        return 2.0 * math.pi / self.wavelength

    @property
    def u_bar(self):
        # (V2 - V0) B0 makes the closed form equal to the finger sum when V0 = V1
        return (self.voltages[2] - self.voltages[0]) * self.B0

    def local_height(self, z_abs):
        return z_abs if self.index == 1 else self.gap - z_abs


@dataclass(frozen=True)
class FieldSample:
    Ex: np.ndarray
    Ez: np.ndarray

    @property
    def magnitude(self):
        return np.hypot(self.Ex, self.Ez)


def potential_finger_sum(layer: IdtLayer, x, z, t=0.0):
    """Sum_j V_j Sum_m Re[B0 e^{-kz} e^{ik(x - j lam/3 - m lam - vt)}], z from the layer."""
    return kernels.finger_potential(
        x, z, t, layer.k, layer.wavelength, layer.velocity, layer.voltages, layer.B0, layer.periods
    )


def _phase(layer, x, t):
    return layer.k * (np.asarray(x, dtype=float) - 2.0 * layer.wavelength / 3.0 - layer.velocity * np.asarray(t, dtype=float))


def potential_closed_form(layer: IdtLayer, x, z, t=0.0, u_bar=None):
    """M u e^{-kz} cos[k(x - 2 lam/3 - vt)], z from the layer surface."""
    u = layer.u_bar if u_bar is None else u_bar
    return layer.periods * u * np.exp(-layer.k * np.asarray(z, dtype=float)) * np.cos(_phase(layer, x, t))


def _check_gap(layer, z_abs):
    z = np.asarray(z_abs, dtype=float)
    if np.any(z < 0.0) or np.any(z > layer.gap) or not np.all(np.isfinite(z)):
        raise DomainError(f"z_abs must lie in [0, D={layer.gap!r}]")
    return z


def field_envelope(layer: IdtLayer, z_abs, u_bar=None):
    z = _check_gap(layer, z_abs)
    u = layer.u_bar if u_bar is None else u_bar
    return layer.periods * u * layer.k * np.exp(-layer.k * layer.local_height(z))


def field_closed_form(layer: IdtLayer, x, z_abs, t=0.0, u_bar=None):
    env = field_envelope(layer, z_abs, u_bar)
    ph = _phase(layer, x, t)
    sign = 1.0 if layer.index == 1 else -1.0
    return FieldSample(env * np.sin(ph), sign * env * np.cos(ph))


def check_harmonicity(layer: IdtLayer, sample_grid, h=None, t=0.0):
    """Max |5-point Laplacian| of the finger-sum potential over ``sample_grid``.

    ``sample_grid`` is an (n, 2) array of (x, z) with z from the layer
    surface.  Default step is 1e-4 wavelengths.  The stencil truncation
    error is h^2/12 (phi_xxxx + phi_zzzz), so refining h gives ~4x.
    """
    pts = np.atleast_2d(np.asarray(sample_grid, dtype=float))
    h = 1e-4 * layer.wavelength if h is None else float(h)
    x, z = pts[:, 0], pts[:, 1]
    if np.any(z - h <= 0.0):
        raise DomainError("harmonicity grid must sit strictly above the surface (z > h)")
    phi = lambda xx, zz: potential_finger_sum(layer, xx, zz, t)  # noqa: E731
    lap = (phi(x + h, z) + phi(x - h, z) + phi(x, z + h) + phi(x, z - h) - 4.0 * phi(x, z)) / (h * h)
    return float(np.max(np.abs(lap)))
