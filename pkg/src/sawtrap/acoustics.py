"""Elastic pieces of the surface-wave problem.

Isotropic medium: strain, stress, the 3x3 secular matrix P(q) for the
ansatz u = (U, V, W) exp(-k q x3 + i k (l x1 + m x2 - v t)) and its decay
constants.  Velocities enter as rho v^2 after the common k^2 is divided
out, so q is dimensionless.

For the cubic piezoelectric case only the stiffness tensor and the
momentum-balance residual are provided; there is no boundary-value
solver.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import numerics
from .errors import DomainError


@dataclass(frozen=True)
class ElasticMedium:
    kappa: float  # Lame lambda, Pa
    mu: float
    rho: float
    c11: float = None
    c12: float = None
    c44: float = None

    def __post_init__(self):
        if not (self.kappa > 0 and self.mu > 0 and self.rho > 0):
            raise ValueError("kappa, mu and rho must be positive")

    @property
    def shear_velocity(self):
        return math.sqrt(self.mu / self.rho)

    @property
    def longitudinal_velocity(self):
        return math.sqrt((self.kappa + 2.0 * self.mu) / self.rho)

    @property
    def is_cubic(self):
        return None not in (self.c11, self.c12, self.c44)


@dataclass(frozen=True)
class PropagationSpec:
    theta: float = 0.0
    velocity: float = 1.0
    k: float = 1.0

    @property
    def l(self):
        return math.cos(self.theta)

    @property
    def m(self):
        return math.sin(self.theta)


def strain_tensor(grad):
    g = np.asarray(grad, dtype=float)
    if g.shape != (3, 3):
        raise ValueError("displacement gradient must be 3x3")
    return 0.5 * (g + g.T)


def isotropic_stress(medium: ElasticMedium, S):
    """T = kappa tr(S) I + 2 mu S."""
    S = np.asarray(S, dtype=float)
    if S.shape != (3, 3):
        raise ValueError("strain must be 3x3")
    if not np.allclose(S, S.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.max(np.abs(S))))):
        raise DomainError("strain tensor must be symmetric")
    return medium.kappa * np.trace(S) * np.eye(3) + 2.0 * medium.mu * S


def secular_matrix(medium: ElasticMedium, spec: PropagationSpec, q):
    """P(q) acting on (U, V, iW); q may be complex."""
    ka, mu = medium.kappa, medium.mu
    rv2 = medium.rho * spec.velocity**2
    l, m = spec.l, spec.m
    km = ka + mu
    q2 = q * q
    P11 = (ka + 2 * mu) * l * l - rv2 + mu * (m * m - q2)
    P22 = (ka + 2 * mu) * m * m - rv2 + mu * (l * l - q2)
    P33 = (ka + 2 * mu) * q2 + rv2 - mu * (l * l + m * m)
    return np.array(
        [
            [P11, km * l * m, km * l * q],
            [km * l * m, P22, km * m * q],
            [km * l * q, km * m * q, P33],
        ],
        dtype=complex if np.iscomplexobj(q) else float,
    )


def secular_determinant(medium, spec, q):
    return np.linalg.det(secular_matrix(medium, spec, q))


def determinant_coefficients(medium: ElasticMedium, spec: PropagationSpec):
    """(c3, c2, c1, c0) with det P(q) = c3 Q^3 + c2 Q^2 + c1 Q + c0, Q = q^2.

    Because l^2 + m^2 = 1 the coefficients do not depend on the angle.
    The leading term is +mu^2 (kappa + 2 mu).
    """
    ka, mu = medium.kappa, medium.mu
    r = medium.rho * spec.velocity**2
    c3 = mu * mu * (ka + 2 * mu)
    c2 = mu * (-3 * ka * mu + 2 * ka * r - 6 * mu * mu + 5 * mu * r)
    c1 = (r - mu) * (-3 * ka * mu + ka * r - 6 * mu * mu + 4 * mu * r)
    c0 = (r - mu) ** 2 * (r - ka - 2 * mu)
    return c3, c2, c1, c0


def solve_decay_constants(medium: ElasticMedium, spec: PropagationSpec, tol=1e-10):
    """Decay constants q1..q3 (Re q >= 0) from det P(q) = 0.

    Residuals are |det P(q)|; the returned tolerance is 1e-8 * max|c_i|.
    ``repeated`` flags numerically coincident q^2 roots.
    """
    coeffs = determinant_coefficients(medium, spec)
    Q = numerics.cubic_roots(*coeffs, tol=tol)
    q = np.sqrt(Q.roots.astype(complex))  # principal branch: Re q >= 0
    res = np.array([abs(secular_determinant(medium, spec, qi)) for qi in q])
    scale = max(abs(c) for c in coeffs)
    return numerics.RootSet(q, res, 1e-8 * scale, repeated=Q.repeated)


def free_space_potential(B4, k, v, position, t=0.0):
    """Re[B4 e^{-kz} e^{ik(x+y)/sqrt2 - ivkt}]."""
    x, y, z = (np.asarray(c, dtype=float) for c in position)
    if np.any(z < 0):
        raise DomainError("free-space potential needs z >= 0")
    return np.real(B4 * np.exp(-k * z) * np.exp(1j * k * (x + y) / math.sqrt(2.0) - 1j * v * k * t))


def cubic_stiffness(medium: ElasticMedium):
    """c_ijkl for a cubic crystal from (c11, c12, c44)."""
    if not medium.is_cubic:
        raise ValueError("medium has no cubic constants")
    c = np.zeros((3, 3, 3, 3))
    d = np.eye(3)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                for l in range(3):
                    if i == j == k == l:
                        c[i, j, k, l] = medium.c11
                    elif i == j and k == l:
                        c[i, j, k, l] = medium.c12
                    elif (i == k and j == l) or (i == l and j == k):
                        c[i, j, k, l] = medium.c44 * (1 - d[i, j])
    return c


def isotropic_stiffness(medium: ElasticMedium):
    d = np.eye(3)
    return (
        medium.kappa * np.einsum("ij,kl->ijkl", d, d)
        + medium.mu * (np.einsum("ik,jl->ijkl", d, d) + np.einsum("il,jk->ijkl", d, d))
    )


def piezo_momentum_residual(rho, stiffness, piezo, accel, u_hessian, phi_hessian):
    """rho u''_i - sum e_kij Phi_,jk - sum c_ijkl u_k,lj at one point.

    ``u_hessian[k, l, j]`` = d^2 u_k / dx_l dx_j; ``piezo[k, i, j]`` = e_kij.
    """
    elastic = np.einsum("ijkl,klj->i", stiffness, u_hessian)
    electric = np.einsum("kij,jk->i", piezo, phi_hessian)
    return rho * np.asarray(accel) - electric - elastic
