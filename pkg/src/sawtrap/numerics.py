"""Shared numerical kernels: linear ODE integration, bracketed root
finding, adaptive quadrature and closed-form cubic roots."""

from dataclasses import dataclass, field
import cmath
import math

import numpy as np
from scipy import integrate as _integrate

from . import kernels
from .errors import (
    DegenerateDegreeError,
    DimensionMismatchError,
    NonFiniteValueError,
    QuadratureError,
    SawtrapError,
    StepUnderflowError,
)

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12
DEFAULT_SCAN_POINTS = 2000


@dataclass
class Trajectory:
    """Sampled solution of a linear ODE.

    ``states[i]`` is the state at ``times[i]``.  The step statistics are
    diagnostics from the integrator; ``max_norm_drift`` covers every
    accepted step, not just the samples.
    """

    times: np.ndarray
    states: np.ndarray
    n_steps: int = 0
    n_rejected: int = 0
    max_norm_drift: float = 0.0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states)
        if self.times.ndim != 1 or self.states.shape[0] != self.times.shape[0]:
            raise DimensionMismatchError("times and states must have equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return self.times.shape[0]

    @property
    def final(self):
        return self.states[-1]

    def norms(self):
        return np.linalg.norm(self.states, axis=1)

    def populations(self):
        return np.abs(self.states) ** 2


@dataclass
class RootSet:
    roots: np.ndarray
    residuals: np.ndarray
    tol: float
    # sign changes whose bracket collapsed without |f| <= tol (poles, jumps)
    rejected: list = field(default_factory=list)
    repeated: bool = False

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    def __getitem__(self, i):
        return self.roots[i]


def integrate_linear_ode(
    generator,
    y0,
    t_end,
    rtol=DEFAULT_RTOL,
    atol=DEFAULT_ATOL,
    t_eval=None,
    n_samples=101,
    max_steps=50_000_000,
):
    """Integrate y' = G y from 0 to ``t_end`` with adaptive Dormand-Prince 5(4).

    Parameters
    ----------
    generator : (n, n) complex array
    y0 : (n,) complex array
    t_end : float
        Must be positive.
    rtol, atol : float
        Mixed error control per component.
    t_eval : array, optional
        Sample times; must start at 0 and end at ``t_end``.  Defaults to
        ``n_samples`` evenly spaced points.

    Raises
    ------
    DimensionMismatchError
        If G is not square or does not match ``y0``.
    StepUnderflowError
        If the step size collapses; ``t_last`` is the last accepted time.
    """
    G = np.asarray(generator, dtype=np.complex128)
    y0 = np.asarray(y0, dtype=np.complex128)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise DimensionMismatchError(f"generator must be square, got shape {G.shape}")
    if y0.ndim != 1 or y0.shape[0] != G.shape[0]:
        raise DimensionMismatchError(
            f"y0 has shape {y0.shape}, generator is {G.shape[0]}x{G.shape[1]}"
        )
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if t_eval is None:
        t_eval = np.linspace(0.0, t_end, max(int(n_samples), 2))
    else:
        t_eval = np.asarray(t_eval, dtype=float)
        if t_eval[0] != 0.0 or not np.isclose(t_eval[-1], t_end) or np.any(np.diff(t_eval) <= 0):
            raise ValueError("t_eval must increase strictly from 0 to t_end")

    states, n_steps, n_rej, status, t_last, drift = kernels.dp54_linear(
        G, y0, t_eval, rtol, atol, max_steps
    )
    if status == kernels.STATUS_UNDERFLOW:
        raise StepUnderflowError(t_last)
    if status == kernels.STATUS_MAX_STEPS:
        raise SawtrapError(f"max_steps={max_steps} exhausted at t={t_last!r}")
    return Trajectory(t_eval, states, int(n_steps), int(n_rej), float(drift))


def _evaluate_grid(f, grid):
    try:
        vals = np.asarray(f(grid), dtype=float)
        if vals.shape == grid.shape:
            return vals
    except Exception:
        pass
    return np.array([float(f(x)) for x in grid])


def _check_finite(x, fx):
    if not math.isfinite(fx):
        raise NonFiniteValueError(x, fx)


def find_roots_bracketed(f, interval, scan_points=DEFAULT_SCAN_POINTS, tol=None, xtol=0.0):
    """All sign changes of ``f`` on a uniform scan of ``interval``, bisected.

    Each bracket is bisected until it collapses to ``xtol`` (or machine
    precision).  A collapsed bracket is kept as a root only if
    |f(root)| <= tol; otherwise its abscissa lands in ``rejected``.  With
    ``tol=None`` the tolerance is 1e-9 times the largest |f| on the scan.
    """
    a, b = (float(v) for v in interval)
    if not a < b:
        raise ValueError("interval must satisfy a < b")
    if scan_points < 2:
        raise ValueError("scan_points must be >= 2")
    grid = np.linspace(a, b, int(scan_points))
    vals = _evaluate_grid(f, grid)
    bad = ~np.isfinite(vals)
    if bad.any():
        i = int(np.argmax(bad))
        raise NonFiniteValueError(grid[i], vals[i])
    if tol is None:
        scale = float(np.max(np.abs(vals)))
        tol = 1e-9 * scale if scale > 0 else 1e-300

    roots, residuals, rejected = [], [], []
    for i in range(len(grid)):
        if vals[i] == 0.0:
            roots.append(grid[i])
            residuals.append(0.0)
    for i in range(len(grid) - 1):
        fa, fb = vals[i], vals[i + 1]
        if fa * fb >= 0.0:
            continue
        lo, hi = grid[i], grid[i + 1]
        for _ in range(400):
            mid = 0.5 * (lo + hi)
            if hi - lo <= max(xtol, 4.0 * np.finfo(float).eps * max(abs(mid), 1e-300)):
                break
            fm = float(f(mid))
            _check_finite(mid, fm)
            if fm == 0.0:
                lo = hi = mid
                fa = fb = 0.0
                break
            if (fm < 0.0) == (fa < 0.0):
                lo, fa = mid, fm
            else:
                hi, fb = mid, fm
        root, fr = (lo, fa) if abs(fa) <= abs(fb) else (hi, fb)
        if abs(fr) <= tol:
            roots.append(root)
            residuals.append(abs(fr))
        else:
            rejected.append(root)
    order = np.argsort(roots)
    return RootSet(
        np.asarray(roots, dtype=float)[order],
        np.asarray(residuals, dtype=float)[order],
        float(tol),
        rejected,
    )


def quadrature(f, a, b, tol=1e-10, limit=200):
    """Adaptive Gauss-Kronrod integral of ``f`` over [a, b] (absolute ``tol``).

    Raises :class:`QuadratureError` carrying the best estimate when the
    error estimate stays above ``tol``.
    """
    if not a < b:
        raise ValueError("need a < b")
    val, err, info, *rest = _integrate.quad(
        f, a, b, epsabs=tol, epsrel=0.0, limit=limit, full_output=1
    )
    if not math.isfinite(val):
        raise QuadratureError(val, err, "integrand is not finite on the interval")
    if err > tol:
        raise QuadratureError(val, err)
    return float(val)


def _poly3(c3, c2, c1, c0, x):
    return ((c3 * x + c2) * x + c1) * x + c0


def cubic_roots(c3, c2, c1, c0, tol=1e-10):
    """Three roots (with multiplicity) of c3 x^3 + c2 x^2 + c1 x + c0.

    Closed form (Cardano with complex cube roots) followed by Newton
    polishing.  ``RootSet.tol`` is ``tol * max|c_i|``; ``repeated`` is set
    when two roots agree to ~sqrt(eps).
    """
    if c3 == 0:
        raise DegenerateDegreeError("leading coefficient c3 is zero")
    coeffs = (c3, c2, c1, c0)
    real_coeffs = all(isinstance(c, (int, float, np.floating, np.integer)) for c in coeffs)
    a, b, c, d = (complex(v) for v in coeffs)
    d0 = b * b - 3 * a * c
    d1 = 2 * b**3 - 9 * a * b * c + 27 * a * a * d
    sq = cmath.sqrt(d1 * d1 - 4 * d0**3)
    w = (d1 + sq) / 2 if abs(d1 + sq) >= abs(d1 - sq) else (d1 - sq) / 2
    if d == 0:
        # exact zero root: deflate so a multiple root at 0 stays exact
        if c == 0:
            raw = [0j, 0j, -b / a]
        else:
            s = cmath.sqrt(b * b - 4 * a * c)
            big = -(b + s) / 2 if abs(b + s) >= abs(b - s) else -(b - s) / 2
            raw = [0j, big / a, c / big]
    elif w == 0:
        raw = [-b / (3 * a)] * 3
    else:
        C = w ** (1.0 / 3.0)
        xi = complex(-0.5, math.sqrt(3.0) / 2.0)
        raw = []
        for kk in range(3):
            ck = C * xi**kk
            raw.append(-(b + ck + d0 / ck) / (3 * a))

    scale = max(abs(v) for v in coeffs)
    roots = []
    for r in raw:
        pr = _poly3(a, b, c, d, r)
        for _ in range(4):
            dp = (3 * a * r + 2 * b) * r + c
            if dp == 0:
                break
            r_new = r - pr / dp
            p_new = _poly3(a, b, c, d, r_new)
            if abs(p_new) < abs(pr):
                r, pr = r_new, p_new
            else:
                break
        if real_coeffs and r.imag != 0.0 and abs(r.imag) <= 1e-7 * max(1.0, abs(r)):
            rr = complex(r.real, 0.0)
            if abs(_poly3(a, b, c, d, rr)) <= tol * scale:
                r = rr
        roots.append(r)

    roots.sort(key=lambda z: (z.real, z.imag))
    arr = np.array(roots, dtype=complex)
    residuals = np.array([abs(_poly3(a, b, c, d, r)) for r in roots])
    gap = min(abs(arr[0] - arr[1]), abs(arr[1] - arr[2]), abs(arr[0] - arr[2]))
    repeated = bool(gap <= 1e-7 * max(1.0, float(np.max(np.abs(arr)))))
    return RootSet(arr, residuals, tol * scale, repeated=repeated)
