"""Forces on a trapped molecule, equilibria and their stability.

Sign convention: positive z-force points up (away from layer 1).  Layer 1
pushes low-field seekers up, layer 2 pushes them down, and an external
field profile pulls down.  Forces are in amu*m/s^2.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.interpolate import CubicSpline

from . import numerics
from .constants import DEBYE_VM_TO_GHZ, GHZ_PER_M_TO_AMU_ACCEL
from .errors import DomainError, NoTrapError, StencilError
from .molecule import MoleculeSpec, effective_dipole, shifted_splitting
from .saw_field import IdtLayer, _check_gap

STABLE = "Stable"
UNSTABLE = "Unstable"
PROFILE_KINDS = ("power_law", "sinusoidal", "polynomial", "tabulated")


@dataclass(frozen=True)
class TrapEquilibrium:
    z_star: float
    stability: str
    residual_force: float

    @property
    def stable(self):
        return self.stability == STABLE


@dataclass
class ExternalFieldProfile:
    """Field magnitude E~(z) of an externally applied trapping field (V/m).

    kinds:
      power_law   f_E z^n
      sinusoidal  f_E sin(n z)
      polynomial  (sum_i c_i z^i) * envelope, envelope in
                  {"none", "sine": 1 + sin(w z), "cosine": 1 + cos(w z)}
      tabulated   cubic spline through (z_table, e_table)
    """

    kind: str = "power_law"
    f_E: float = 1.0
    n: float = 1.0
    coefficients: tuple = ()
    envelope: str = "none"
    envelope_rate: float = 0.0
    z_table: tuple = ()
    e_table: tuple = ()
    regularizer: float = 0.01
    gain: float = 1.0
    _spline: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"profile kind must be one of {PROFILE_KINDS}, got {self.kind!r}")
        if not self.regularizer > 0:
            raise ValueError("regularizer must be positive")
        if self.envelope not in ("none", "sine", "cosine"):
            raise ValueError("envelope must be 'none', 'sine' or 'cosine'")
        if self.kind == "tabulated":
            z = np.asarray(self.z_table, dtype=float)
            e = np.asarray(self.e_table, dtype=float)
            if z.shape != e.shape or z.ndim != 1:
                raise ValueError("z_table and e_table must be 1D and equally long")
            if z.size < 3:
                raise ValueError("tabulated profile needs at least 3 points")
            self._spline = CubicSpline(z, e)

    def _envelope(self, z):
        w = self.envelope_rate
        if self.envelope == "sine":
            return 1.0 + np.sin(w * z), w * np.cos(w * z)
        if self.envelope == "cosine":
            return 1.0 + np.cos(w * z), -w * np.sin(w * z)
        return np.ones_like(z), np.zeros_like(z)

    def field(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "power_law":
            return self.f_E * z**self.n
        if self.kind == "sinusoidal":
            return self.f_E * np.sin(self.n * z)
        if self.kind == "polynomial":
            poly = np.polynomial.polynomial.polyval(z, self.coefficients or (0.0,))
            return poly * self._envelope(z)[0]
        return self._spline(z)

    def field_times_slope(self, z):
        """E~ dE~/dz, i.e. half of d|E~|^2/dz."""
        z = np.asarray(z, dtype=float)
        if self.kind == "power_law":
            if self.f_E == 0.0 or self.n == 0.0:
                return np.zeros_like(z)
            return self.f_E**2 * self.n * z ** (2.0 * self.n - 1.0)
        if self.kind == "sinusoidal":
            nz = self.n * z
            return self.f_E**2 * self.n * np.sin(nz) * np.cos(nz)
        if self.kind == "polynomial":
            c = self.coefficients or (0.0,)
            p = np.polynomial.polynomial.polyval(z, c)
            dp = np.polynomial.polynomial.polyval(z, np.polynomial.polynomial.polyder(c)) if len(c) > 1 else 0.0
            env, denv = self._envelope(z)
            return p * env * (dp * env + p * denv)
        # tabulated: central difference on the spline
        span = float(self.z_table[-1] - self.z_table[0])
        h = 1e-6 * span
        return self._spline(z) * (self._spline(z + h) - self._spline(z - h)) / (2.0 * h)


def _u_bar(layer, u_bar):
    return layer.u_bar if u_bar is None else u_bar


def saw_force(
    layer: IdtLayer,
    spec: MoleculeSpec,
    z_abs,
    u_bar=None,
    E_Lambda=None,
    conversion=DEBYE_VM_TO_GHZ,
):
    """(Fx, Fz, degenerate) from one SAW layer on the envelope.

    |Fz| = mu^2 M^2 u^2 k^3 e^{-2k z~} / sqrt((E/2)^2 + (mu |E_z|)^2), the
    z~-gradient of the Stark level; Fx vanishes identically.
    """
    z = _check_gap(layer, z_abs)
    E = shifted_splitting(spec, layer.k, layer.velocity) if E_Lambda is None else E_Lambda
    mu = effective_dipole(spec) * conversion
    k = layer.k
    u = _u_bar(layer, u_bar)
    decay = np.exp(-k * layer.local_height(z))
    g = mu * layer.periods * u * k * decay  # GHz
    denom = np.hypot(0.5 * E, g)
    degenerate = bool(np.any(denom == 0.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        mag = np.where(denom > 0.0, k * g * g / np.where(denom > 0.0, denom, 1.0), 0.0)
    sign = 1.0 if layer.index == 1 else -1.0
    fz = sign * mag * GHZ_PER_M_TO_AMU_ACCEL
    if np.ndim(fz) == 0:
        fz = float(fz)
    return 0.0 * fz, fz, degenerate


def ratio_band(k, D):
    """Admissible u1/u2 for a two-layer trap: (e^{-kD}, e^{kD})."""
    return math.exp(-k * D), math.exp(k * D)


def two_layer_equilibrium(u1, u2, k, D):
    """z0 = ln(e^{kD} u1/u2) / 2k, where the two layer forces balance."""
    if not (u1 > 0 and u2 > 0):
        raise ValueError("u1 and u2 must be positive")
    if not (k > 0 and D > 0):
        raise ValueError("k and D must be positive")
    r = u1 / u2
    lo, hi = ratio_band(k, D)
    if r <= lo:
        raise NoTrapError("lower", f"u1/u2={r!r} <= e^(-kD)={lo!r}: equilibrium falls below layer 1")
    if r >= hi:
        raise NoTrapError("upper", f"u1/u2={r!r} >= e^(kD)={hi!r}: equilibrium falls above layer 2")
    z0 = (math.log(r) + k * D) / (2.0 * k)
    # relative imbalance of u1^2 e^{-2kz} vs u2^2 e^{-2k(D-z)}
    a = u1 * u1 * math.exp(-2.0 * k * z0)
    b = u2 * u2 * math.exp(-2.0 * k * (D - z0))
    return TrapEquilibrium(z0, STABLE, (a - b) / max(a, b))


def external_force(profile: ExternalFieldProfile, spec: MoleculeSpec, z, conversion=DEBYE_VM_TO_GHZ):
    """Magnitude of the downward force from the external field.

    gain * |mu_eff| * |E~ E~'| / (|E~| + eps), the linear-Stark form of the
    level gradient with the regularised 1/|E~|.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < 0.0):
        raise DomainError("external field is defined for z >= 0")
    ee = profile.field_times_slope(z)
    mag = np.abs(ee) / (np.abs(profile.field(z)) + profile.regularizer)
    out = profile.gain * abs(effective_dipole(spec)) * conversion * mag * GHZ_PER_M_TO_AMU_ACCEL
    return float(out) if out.ndim == 0 else out


def net_force(profile, layer, spec, z, conversion=DEBYE_VM_TO_GHZ):
    """Upward SAW force minus the downward external force."""
    _, fz, _ = saw_force(layer, spec, z, conversion=conversion)
    return fz - external_force(profile, spec, z, conversion)


def find_trap_layers(
    profile: ExternalFieldProfile,
    layer: IdtLayer,
    spec: MoleculeSpec,
    z_range=None,
    scan_points=numerics.DEFAULT_SCAN_POINTS,
    tol=None,
    conversion=DEBYE_VM_TO_GHZ,
):
    """Equilibria where the SAW force balances the external force.

    Stable iff the net upward force changes from positive to negative
    across z*, checked at z* -/+ 1e-4 D.
    """
    lo, hi = (0.0, layer.gap) if z_range is None else z_range
    if lo < 0.0 or hi > layer.gap or not lo < hi:
        raise DomainError(f"z_range must be an interval inside [0, D={layer.gap!r}]")
    f = lambda zz: net_force(profile, layer, spec, zz, conversion)  # noqa: E731
    roots = numerics.find_roots_bracketed(f, (lo, hi), scan_points, tol)
    delta = 1e-4 * layer.gap
    out = []
    for z_star, res in zip(roots.roots, roots.residuals):
        zl, zh = max(z_star - delta, 0.0), min(z_star + delta, layer.gap)
        label = STABLE if f(zl) > 0.0 > f(zh) else UNSTABLE
        out.append(TrapEquilibrium(float(z_star), label, float(res)))
    return out


def force_divergence(
    potential,
    spec: MoleculeSpec,
    x,
    z,
    h=1e-5,
    E_Lambda=None,
    conversion=DEBYE_VM_TO_GHZ,
):
    """div F = -mu^2 [phi_xx^2 + phi_zz^2 + 2 phi_xz^2] / sqrt((E/2)^2 + mu^2 |grad phi|^2).

    ``potential(x, z)`` in volts.  Derivatives are central differences
    with step ``h`` (m); result in amu*m/s^2 per metre.
    """
    E = spec.doublet if E_Lambda is None else E_Lambda
    mu = effective_dipole(spec) * conversion
    p = {}
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            p[i, j] = float(potential(x + i * h, z + j * h))
    pxx = (p[1, 0] - 2.0 * p[0, 0] + p[-1, 0]) / (h * h)
    pzz = (p[0, 1] - 2.0 * p[0, 0] + p[0, -1]) / (h * h)
    pxz = (p[1, 1] - p[1, -1] - p[-1, 1] + p[-1, -1]) / (4.0 * h * h)
    curv = max(abs(pxx), abs(pzz), abs(pxz))
    if curv == 0.0:
        return 0.0
    noise = np.finfo(float).eps * max(abs(v) for v in p.values()) / (h * h)
    if noise > 1e-6 * curv:
        raise StencilError(
            f"step h={h!r} loses precision (roundoff ~{noise:.3g} vs curvature {curv:.3g}); use a larger step"
        )
    px = (p[1, 0] - p[-1, 0]) / (2.0 * h)
    pz = (p[0, 1] - p[0, -1]) / (2.0 * h)
    denom = math.hypot(0.5 * E, mu * math.hypot(px, pz))
    return -(mu * mu) * (pxx**2 + pzz**2 + 2.0 * pxz**2) / denom * GHZ_PER_M_TO_AMU_ACCEL
