"""Bose-Hubbard parameters of a 1D trapped-molecule lattice and the
superfluid / Mott-insulator classification.

Energies are in the same (unstated) unit as the potential scale B0.
Lengths entering the Gaussian Wannier overlaps are measured in units of
``LatticeGeometry.wannier_length`` (w(x) = exp(-x^2/2) is dimensionless),
so the hopping prefactor uses Delta = (W/N) / wannier_length.
"""

from dataclasses import dataclass, replace
import math

import numpy as np

from . import kernels, numerics
from .errors import NoBoundaryError, QuadratureError

SUPERFLUID = "Superfluid"
MOTT = "MottInsulator"

GAUSS_2X2 = math.sqrt(math.pi / 2.0)  # int exp(-2x^2) dx
DELTA_J_RANGE = (-5.0, 5.0)
DELTA_EPS_RANGE = (-100.0, 100.0)


@dataclass(frozen=True)
class LatticeGeometry:
    N: int = 10
    width: float = 0.005
    z: float = 0.01
    k: float = 50.0
    B0: float = 100.0
    mass: float = 0.1
    wannier_length: float = 1e-3
    velocity: float = 3000.0

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if not self.width > 0 or not self.wannier_length > 0:
            raise ValueError("width and wannier_length must be positive")
        if not self.mass > 0:
            raise ValueError("mass must be positive")

    @property
    def spacing(self):
        return self.width / self.N

    @property
    def delta(self):
        """Dimensionless site spacing."""
        return self.spacing / self.wannier_length


@dataclass(frozen=True)
class BoseHubbardParams:
    J: float
    U: float
    eps: float
    delta_J: float = 0.0
    delta_eps: float = 0.0

    def __post_init__(self):
        if not self.U > 0:
            raise ValueError("U must be positive")
        if not math.isfinite(self.J):
            raise ValueError("J must be finite")

    @property
    def J_over_U(self):
        return self.J / self.U

    @property
    def eps_over_U(self):
        return self.eps / self.U


@dataclass(frozen=True)
class PhasePoint:
    z: float
    N: int
    J_over_U: float
    phase: str
    eps_over_U: float = float("nan")
    lobe_phase: str = ""


def hopping_J(geom: LatticeGeometry, delta_J=0.0, kinetic=False):
    d = geom.delta
    g = math.exp(-d * d)
    J = d * (geom.B0 * math.exp(-geom.k * geom.z) + delta_J) * g
    if kinetic:
        J += d * (1.0 - d * d) / (2.0 * geom.mass) * g
    return J


def onsite_U(m0, tol=1e-13):
    """(4 pi / m0) int exp(-2x^2) dx, by quadrature, checked against sqrt(pi/2)."""
    if not m0 > 0:
        raise ValueError("m0 must be positive")
    # the tails beyond |x| = 12 are below exp(-288)
    val = numerics.quadrature(lambda x: math.exp(-2.0 * x * x), -12.0, 12.0, tol)
    if abs(val - GAUSS_2X2) > 1e-10 * GAUSS_2X2:
        raise QuadratureError(val, abs(val - GAUSS_2X2), "Gaussian overlap disagrees with sqrt(pi/2)")
    return 4.0 * math.pi / m0 * val


def onsite_eps(geom: LatticeGeometry, delta_eps=0.0):
    return (geom.B0 + delta_eps) * math.exp(-geom.k * geom.z)


def wannier_J_general(geom: LatticeGeometry, pair=(0, 1), t=0.0, center=0.0, rtol=1e-11):
    """Overlap of two Gaussian Wannier functions sandwiching the
    single-particle operator -d^2/dx^2 / 2m0 + B0 e^{-kz} cos[k(x - vt)].

    Sites sit at ``center + (mu - (mu+nu)/2) Delta``, so the pair midpoint
    is ``center`` (dimensionless).  Evaluated by adaptive quadrature to an
    absolute tolerance of ``rtol`` times the operator scale.
    """
    mu, nu = pair
    d = geom.delta
    xm = center + (mu - 0.5 * (mu + nu)) * d
    xn = center + (nu - 0.5 * (mu + nu)) * d
    kappa = geom.k * geom.wannier_length
    amp = geom.B0 * math.exp(-geom.k * geom.z)
    phase_t = geom.k * geom.velocity * t
    inv2m = 1.0 / (2.0 * geom.mass)

    def integrand(x):
        a = x - xm
        b = x - xn
        wm = math.exp(-0.5 * a * a)
        wn = math.exp(-0.5 * b * b)
        # -w'' / 2m0 with w'' = (b^2 - 1) w
        return wm * (-(b * b - 1.0) * inv2m + amp * math.cos(kappa * x - phase_t)) * wn

    lo = min(xm, xn) - 14.0
    hi = max(xm, xn) + 14.0
    tol = rtol * max(1.0, amp + inv2m)
    return numerics.quadrature(integrand, lo, hi, tol)


def wannier_J_analytic(geom: LatticeGeometry, pair=(0, 1), t=0.0, center=0.0):
    """Closed form of :func:`wannier_J_general` (Gaussian moments)."""
    mu, nu = pair
    d = abs(mu - nu) * geom.delta
    kappa = geom.k * geom.wannier_length
    amp = geom.B0 * math.exp(-geom.k * geom.z)
    kin = (0.5 - 0.25 * d * d) / (2.0 * geom.mass)
    pot = amp * math.exp(-0.25 * kappa * kappa) * math.cos(kappa * center - geom.k * geom.velocity * t)
    return math.sqrt(math.pi) * math.exp(-0.25 * d * d) * (kin + pot)


def critical_ratio(n0):
    """f_n0 = n0 + 1/2 - sqrt(n0(n0+1)), in cancellation-free form."""
    if n0 < 1 or int(n0) != n0:
        raise ValueError("n0 must be a positive integer")
    return 0.25 / (n0 + 0.5 + math.sqrt(n0 * (n0 + 1.0)))


def boundary_discriminant(J_over_U, n0):
    return J_over_U**2 - (2 * n0 + 1) * J_over_U + 0.25


def boundary_merge_point(n0):
    """Smaller root of (J/U)^2 - (2n0+1) J/U + 1/4, where the lobe closes."""
    b = 2.0 * n0 + 1.0
    big = 0.5 * (b + math.sqrt(b * b - 1.0))
    return 0.25 / big


def phase_boundary_eps(J_over_U, n0):
    """(upper, lower) eps/U on the lobe boundary for a given J/U."""
    disc = boundary_discriminant(J_over_U, n0)
    if disc < 0.0:
        raise NoBoundaryError(f"J/U={J_over_U!r} lies past the lobe tip for n0={n0}")
    r = math.sqrt(disc)
    base = n0 - 0.5 - J_over_U
    return base + r, base - r


def classify_ratio(J_over_U, n0):
    return SUPERFLUID if J_over_U > critical_ratio(n0) else MOTT


def lobe_phase(J_over_U, eps_over_U, n0):
    """Mott iff eps/U falls between the two boundary branches."""
    try:
        up, lo = phase_boundary_eps(J_over_U, n0)
    except NoBoundaryError:
        return SUPERFLUID
    return MOTT if lo <= eps_over_U <= up else SUPERFLUID


def thermal_hopping(J, beta_DeltaU):
    """J_T = J exp(-beta Delta_U), with beta Delta_U given in units of U."""
    return J * math.exp(-beta_DeltaU)


def bose_hubbard_params(geom: LatticeGeometry, delta_J=0.0, delta_eps=0.0, kinetic=False, beta_DeltaU=0.0):
    J = thermal_hopping(hopping_J(geom, delta_J, kinetic), beta_DeltaU)
    return BoseHubbardParams(J, onsite_U(geom.mass), onsite_eps(geom, delta_eps), delta_J, delta_eps)


def classify_phase(geom: LatticeGeometry, n0=1, delta_J=0.0, delta_eps=0.0, kinetic=False, beta_DeltaU=0.0):
    p = bose_hubbard_params(geom, delta_J, delta_eps, kinetic, beta_DeltaU)
    x = p.J_over_U
    return PhasePoint(geom.z, geom.N, x, classify_ratio(x, n0), p.eps_over_U, lobe_phase(x, p.eps_over_U, n0))


def draw_perturbations(shape, seed, delta_J_range=DELTA_J_RANGE, delta_eps_range=DELTA_EPS_RANGE):
    """Uniform (delta_J, delta_eps) grids; the stream is consumed J first."""
    rng = np.random.default_rng(seed)
    dJ = rng.uniform(delta_J_range[0], delta_J_range[1], size=shape)
    dE = rng.uniform(delta_eps_range[0], delta_eps_range[1], size=shape)
    return dJ, dE


def phase_diagram(
    z_values,
    N_values,
    base: LatticeGeometry = None,
    n0=1,
    perturb=False,
    seed=0,
    kinetic=False,
    beta_DeltaU=0.0,
    delta_J_range=DELTA_J_RANGE,
    delta_eps_range=DELTA_EPS_RANGE,
):
    """Classify every (z, N) grid point; rows ordered by z, then N.

    With ``perturb`` the perturbations are drawn up front for the whole
    grid, so the result does not depend on evaluation order.
    """
    base = LatticeGeometry() if base is None else base
    z = np.asarray(list(z_values), dtype=float)
    Ns = np.asarray(list(N_values), dtype=int)
    if z.size == 0 or Ns.size == 0:
        raise ValueError("z and N ranges must be non-empty")
    if np.any(Ns < 2):
        raise ValueError("N must be >= 2")
    shape = (z.size, Ns.size)
    if perturb:
        dJ, dE = draw_perturbations(shape, seed, delta_J_range, delta_eps_range)
    else:
        dJ = np.zeros(shape)
        dE = np.zeros(shape)
    Z, NN = np.meshgrid(z, Ns, indexing="ij")
    spacing = base.width / NN / base.wannier_length
    U = onsite_U(base.mass)
    jr, er = kernels.bh_ratio(
        Z.ravel(), spacing.ravel(), dJ.ravel(), dE.ravel(),
        base.B0, base.k, base.mass, U, kinetic, math.exp(-beta_DeltaU),
    )
    f = critical_ratio(n0)
    out = []
    for i, (zz, nn) in enumerate(zip(Z.ravel(), NN.ravel())):
        x = float(jr[i])
        e = float(er[i])
        out.append(PhasePoint(float(zz), int(nn), x, SUPERFLUID if x > f else MOTT, e, lobe_phase(x, e, n0)))
    return out


def with_height(geom: LatticeGeometry, z):
    return replace(geom, z=z)
