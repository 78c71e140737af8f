"""Amplitude dynamics of molecules hopping between trap sites.

Two models live here.  The dipolar model evolves p_n with on-site energy
U0 and couplings v_nj = c / |x_n - x_j|^3 between every pair of sites.  The
shielding model is a nearest-neighbour chain (open ends) with an
optional long-range term gamma_nj, used to compare runs with and without
it.

Both generators are -i times a real symmetric matrix, so evolutions can
run either through the adaptive RK integrator (``method="rk"``) or
through an exact eigendecomposition (``method="spectral"``).  The
spectral path is what makes N = 500 with near-neighbour couplings of
order 1e8 tractable; the RK path is kept as the independent route.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.linalg import expm

from . import kernels, numerics
from .errors import CoincidentSitesError, DimensionMismatchError, PoleError

DEFAULT_T = 10.0


@dataclass(frozen=True)
class LatticeConfig:
    positions: np.ndarray
    U0: float = 2.0
    c: float = 0.4

    def __post_init__(self):
        pts = np.asarray(self.positions, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("positions must be a non-empty list of points")
        object.__setattr__(self, "positions", pts)
        if pts.shape[0] > 1:
            # sort-free duplicate check: any zero pair distance
            diff = pts[:, None, :] - pts[None, :, :]
            d2 = np.einsum("ijk,ijk->ij", diff, diff)
            np.fill_diagonal(d2, np.inf)
            if np.any(d2 == 0.0):
                i, j = np.argwhere(d2 == 0.0)[0]
                raise CoincidentSitesError(int(i) + 1, int(j) + 1)

    @property
    def N(self):
        return self.positions.shape[0]

    @classmethod
    def chain(cls, N, spacing=0.1, U0=2.0, c=0.4, start=None):
        """x_n = spacing * n for n = 1..N (or from ``start``)."""
        x0 = spacing if start is None else start
        return cls(x0 + spacing * np.arange(N), U0, c)

    @classmethod
    def spanning(cls, N, interval, U0=2.0, c=0.4):
        lo, hi = interval
        return cls(np.linspace(lo, hi, N), U0, c)


@dataclass
class AmplitudeState:
    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.ndim != 1:
            raise ValueError("amplitudes must be a vector")

    @property
    def N(self):
        return self.amplitudes.shape[0]

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    @classmethod
    def localized(cls, N, site=1):
        a = np.zeros(N, dtype=complex)
        a[site - 1] = 1.0
        return cls(a)

    @classmethod
    def uniform(cls, N, count=None):
        """1/sqrt(count) on the first ``count`` sites (all sites by default)."""
        m = N if count is None else count
        a = np.zeros(N, dtype=complex)
        a[:m] = 1.0 / math.sqrt(m)
        return cls(a)

    @classmethod
    def random(cls, N, seed):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        return cls(a / np.linalg.norm(a))


def _check_normalized(state, N):
    if state.N != N:
        raise DimensionMismatchError(f"state has {state.N} sites, lattice has {N}")
    if abs(state.norm() - 1.0) > 1e-8:
        raise ValueError(f"initial state must be normalized, |p0| = {state.norm()!r}")


def coupling_matrix(cfg: LatticeConfig):
    return kernels.dipole_matrix(cfg.positions, cfg.c)


def anderson_hamiltonian(cfg: LatticeConfig):
    """U0 I + V, so that p' = -i H p."""
    return cfg.U0 * np.eye(cfg.N) + coupling_matrix(cfg)


def spectral_evolve(H, y0, times):
    """Exact y(t) = exp(-iHt) y0 for real symmetric H, as a Trajectory."""
    w, U = np.linalg.eigh(H)
    c = U.conj().T @ y0
    phases = np.exp(-1j * np.outer(times, w))
    states = (phases * c) @ U.T
    return numerics.Trajectory(times, states)


def _evolve(H, y0, T, method, n_samples, rtol, atol):
    times = np.linspace(0.0, T, n_samples)
    if method == "spectral":
        return spectral_evolve(H, y0, times)
    if method == "rk":
        return numerics.integrate_linear_ode(-1j * H, y0, T, rtol=rtol, atol=atol, t_eval=times)
    raise ValueError(f"method must be 'rk' or 'spectral', got {method!r}")


def anderson_evolve(
    cfg: LatticeConfig,
    p0: AmplitudeState,
    T=DEFAULT_T,
    method="rk",
    n_samples=101,
    rtol=1e-11,
    atol=1e-14,
):
    _check_normalized(p0, cfg.N)
    return _evolve(anderson_hamiltonian(cfg), p0.amplitudes, T, method, n_samples, rtol, atol)


def time_averaged_occupation(H, y0, T):
    """(1/T) int_0^T |y_n(t)|^2 dt for y' = -iHy, in closed form.

    With H = U diag(w) U^T and A_na = U_na c_a the average is
    sum_ab A_na K_ab conj(A_nb), K_ab = (1/T) int e^{-i(w_a - w_b)t} dt.
    """
    w, U = np.linalg.eigh(H)
    c = U.conj().T @ np.asarray(y0, dtype=complex)
    A = U * c[None, :]
    x = (w[:, None] - w[None, :]) * T
    small = np.abs(x) < 1e-8
    with np.errstate(invalid="ignore", divide="ignore"):
        K = np.where(small, 1.0 - 0.5j * x, (1.0 - np.exp(-1j * x)) / np.where(small, 1.0, 1j * x))
    avg = np.einsum("na,ab,nb->n", A, K, A.conj())
    return avg.real


def anderson_time_average(cfg: LatticeConfig, p0: AmplitudeState, T=DEFAULT_T):
    _check_normalized(p0, cfg.N)
    return time_averaged_occupation(anderson_hamiltonian(cfg), p0.amplitudes, T)


@dataclass(frozen=True)
class LaplaceCoefficients:
    alpha: float
    beta: float
    U0: float

    @property
    def discriminant(self):
        return self.U0**3 - self.alpha * self.U0 + self.beta

    @property
    def predicted_limit(self):
        """Final-value prediction for p1(t): 0 unless the discriminant vanishes."""
        return 0.0 if self.discriminant != 0.0 else None


def laplace_coefficients(cfg: LatticeConfig):
    """alpha = sum_j v_1j^2 and beta = sum_j v_1j sum_{j' != j} v_jj' v_j'1 (j, j' >= 2)."""
    if cfg.N < 2:
        raise ValueError("need at least two sites")
    v = coupling_matrix(cfg)
    alpha = float(np.sum(v[0, 1:] ** 2))
    beta = kernels.laplace_beta(v)
    return LaplaceCoefficients(alpha, beta, cfg.U0)


def _coeffs(obj):
    return obj if isinstance(obj, LaplaceCoefficients) else laplace_coefficients(obj)


def p1_laplace(cfg, s):
    """P1(s) = i w^2 / (w^3 - alpha w - beta), w = is - U0."""
    co = _coeffs(cfg)
    w = 1j * s - co.U0
    den = w**3 - co.alpha * w - co.beta
    scale = max(abs(w) ** 3, co.alpha * abs(w), abs(co.beta), 1e-300)
    if abs(den) <= 1e-14 * scale:
        raise PoleError(s)
    return 1j * w * w / den


def p1_time_domain(cfg, t):
    """Inverse transform of P1(s): p1(t) = e3^T exp(-i(U0 + A) t) e3.

    A is the companion matrix of w^3 - alpha w - beta, so that
    e3^T (wI - A)^{-1} e3 = w^2 / (w^3 - alpha w - beta).  This stays valid
    when poles coincide, where a partial-fraction sum would not.
    """
    co = _coeffs(cfg)
    A = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [co.beta, co.alpha, 0.0]])
    G = -1j * (co.U0 * np.eye(3) + A)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.array([expm(G * ti)[2, 2] for ti in ts])
    return out if np.ndim(t) else complex(out[0])


def continuum_convergence(base: LatticeConfig, N_list, T=DEFAULT_T, interval=None):
    """Time-averaged |p1|^2 as the site count grows on a fixed interval.

    Returns rows ``(N, value, deviation)``, deviation being the change from
    the previous N (0 for the first).  Sites are evenly spaced across
    ``interval`` (default: the span of ``base``); U0 and c are kept.
    """
    Ns = list(N_list)
    if any(b < a for a, b in zip(Ns, Ns[1:])):
        raise ValueError("N_list must be non-decreasing")
    if interval is None:
        x = base.positions[:, 0]
        interval = (float(x.min()), float(x.max()))
    rows, prev = [], None
    for N in Ns:
        if N == 1:
            val = 1.0
        else:
            cfg = LatticeConfig.spanning(N, interval, base.U0, base.c)
            val = float(anderson_time_average(cfg, AmplitudeState.localized(N), T)[0])
        rows.append((N, val, 0.0 if prev is None else abs(val - prev)))
        prev = val
    return rows


LONG_RANGE_KINDS = ("uniform", "power_law", "off")


@dataclass(frozen=True)
class ShieldingConfig:
    N: int = 10
    V: float = 1.0
    U0: float = 0.1
    long_range: str = "uniform"
    gamma: float = None  # uniform: 2.0, power_law: V

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("shielding chain needs N >= 2")
        if self.long_range not in LONG_RANGE_KINDS:
            raise ValueError(f"long_range must be one of {LONG_RANGE_KINDS}")

    @property
    def gamma_amplitude(self):
        if self.gamma is not None:
            return self.gamma
        return 2.0 if self.long_range == "uniform" else self.V


def long_range_matrix(cfg: ShieldingConfig):
    n = np.arange(cfg.N)
    d = np.abs(n[:, None] - n[None, :]).astype(float)
    g = cfg.gamma_amplitude
    if cfg.long_range == "off":
        return np.zeros((cfg.N, cfg.N))
    if cfg.long_range == "uniform":
        out = np.full((cfg.N, cfg.N), g)
    else:
        with np.errstate(divide="ignore"):
            out = g / d**3
    np.fill_diagonal(out, 0.0)
    return out


def shielding_hamiltonian(cfg: ShieldingConfig, long_range=True):
    """H_N = -V sum (|n><n+1| + h.c.) - sum gamma_nj |n><j| - U0 sum |n><n|.

    The amplitude equations c' = iV c_{n+1} + iV c_{n-1} + i sum gamma c_j
    + iU0 c_n are exactly c' = -i H_N c.
    """
    H = -cfg.U0 * np.eye(cfg.N)
    idx = np.arange(cfg.N - 1)
    H[idx, idx + 1] = -cfg.V
    H[idx + 1, idx] = -cfg.V
    if long_range:
        H = H - long_range_matrix(cfg)
    return H


def shielding_generator(cfg: ShieldingConfig, long_range=True):
    return -1j * shielding_hamiltonian(cfg, long_range)


def shielding_final_states(cfg, initial: AmplitudeState, T=DEFAULT_T, method="rk", rtol=1e-11, atol=1e-14):
    _check_normalized(initial, cfg.N)
    out = []
    for lr in (True, False):
        H = shielding_hamiltonian(cfg, lr)
        tr = _evolve(H, initial.amplitudes, T, method, 2, rtol, atol)
        out.append(tr.final)
    return out[0], out[1]


def shielding_deviation(cfg: ShieldingConfig, initial: AmplitudeState, T=DEFAULT_T, method="rk"):
    """max_n | |c_n(T)|^2 - |c'_n(T)|^2 | between runs with and without gamma."""
    c_on, c_off = shielding_final_states(cfg, initial, T, method)
    return float(np.max(np.abs(np.abs(c_on) ** 2 - np.abs(c_off) ** 2)))
