"""Hot numeric kernels with numba and pure-numpy implementations.

Every kernel exists twice: ``<name>_numba`` (compiled loop) and
``<name>_numpy`` (vectorised or interpreted numpy).  The unsuffixed name
dispatches on :data:`sawtrap._accel.USE_NUMBA`.  Both variants take and
return plain arrays so the benchmark can time them side by side.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

# Dormand-Prince 5(4) tableau.
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAX_STEPS = 2


def _dp54_linear_loop(G, y0, t_eval, rtol, atol, max_steps):
    """Adaptive DP5(4) for y' = G y, stepping exactly onto each t_eval.

    Returns (states, n_steps, n_rejected, status, t_last, max_norm_drift).
    ``t_eval[0]`` must be 0.  ``max_norm_drift`` is max |‖y(t)‖ - ‖y0‖|
    over every accepted step, not only the sampled ones.
    """
    n = y0.shape[0]
    n_eval = t_eval.shape[0]
    out = np.zeros((n_eval, n), dtype=np.complex128)
    y = y0.copy()
    out[0, :] = y
    norm0 = np.sqrt(np.sum(np.abs(y) ** 2))
    max_drift = 0.0

    g_norm = 0.0
    for i in range(n):
        row = 0.0
        for j in range(n):
            row += abs(G[i, j])
        if row > g_norm:
            g_norm = row
    t_end = t_eval[n_eval - 1]
    if g_norm > 0.0:
        h = min(t_end, 0.5 * rtol ** 0.2 / g_norm)
    else:
        h = t_end

    t = 0.0
    n_steps = 0
    n_rejected = 0
    k1 = np.dot(G, y)
    for idx in range(1, n_eval):
        target = t_eval[idx]
        while t < target:
            if n_steps + n_rejected >= max_steps:
                return out, n_steps, n_rejected, STATUS_MAX_STEPS, t, max_drift
            clamped = False
            h_try = h
            if t + h_try >= target:
                h_try = target - t
                clamped = True
            if h_try <= 1e-14 * max(1.0, abs(t)):
                return out, n_steps, n_rejected, STATUS_UNDERFLOW, t, max_drift

            k2 = np.dot(G, y + h_try * (_A21 * k1))
            k3 = np.dot(G, y + h_try * (_A31 * k1 + _A32 * k2))
            k4 = np.dot(G, y + h_try * (_A41 * k1 + _A42 * k2 + _A43 * k3))
            k5 = np.dot(G, y + h_try * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
            k6 = np.dot(
                G, y + h_try * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5)
            )
            y_new = y + h_try * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
            k7 = np.dot(G, y_new)
            err_vec = h_try * (
                _E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7
            )
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = np.sqrt(np.mean(np.abs(err_vec / scale) ** 2))

            if err <= 1.0:
                if err == 0.0:
                    fac = 5.0
                else:
                    fac = min(5.0, max(0.2, 0.9 * err ** -0.2))
                t = target if clamped else t + h_try
                y = y_new
                k1 = k7
                n_steps += 1
                drift = abs(np.sqrt(np.sum(np.abs(y) ** 2)) - norm0)
                if drift > max_drift:
                    max_drift = drift
                if clamped:
                    h = max(h, h_try * fac)
                else:
                    h = h_try * fac
            else:
                n_rejected += 1
                h = h_try * max(0.2, 0.9 * err ** -0.2)
        out[idx, :] = y
    return out, n_steps, n_rejected, STATUS_OK, t, max_drift


dp54_linear_numba = njit(_dp54_linear_loop)
# The RK recursion is inherently sequential; the numpy path is the same
# loop interpreted, with numpy doing the mat-vecs.
dp54_linear_numpy = _dp54_linear_loop


def dp54_linear(G, y0, t_eval, rtol, atol, max_steps):
    fn = dp54_linear_numba if USE_NUMBA else dp54_linear_numpy
    return fn(
        np.ascontiguousarray(G, dtype=np.complex128),
        np.ascontiguousarray(y0, dtype=np.complex128),
        np.ascontiguousarray(t_eval, dtype=np.float64),
        float(rtol),
        float(atol),
        int(max_steps),
    )


def _dipole_matrix_loop(points, c):
    n = points.shape[0]
    d = points.shape[1]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            r2 = 0.0
            for a in range(d):
                diff = points[i, a] - points[j, a]
                r2 += diff * diff
            val = c / (r2 * np.sqrt(r2))
            out[i, j] = val
            out[j, i] = val
    return out


dipole_matrix_numba = njit(_dipole_matrix_loop)


def dipole_matrix_numpy(points, c):
    diff = points[:, None, :] - points[None, :, :]
    r = np.sqrt(np.sum(diff * diff, axis=-1))
    np.fill_diagonal(r, np.inf)
    return c / r**3


def dipole_matrix(points, c):
    """c/|x_n - x_j|^3 with a zero diagonal; ``points`` is (N, dim)."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if USE_NUMBA:
        return dipole_matrix_numba(pts, float(c))
    return dipole_matrix_numpy(pts, float(c))


def _laplace_beta_loop(v):
    n = v.shape[0]
    beta = 0.0
    for j in range(1, n):
        inner = 0.0
        for jp in range(1, n):
            if jp != j:
                inner += v[j, jp] * v[jp, 0]
        beta += v[0, j] * inner
    return beta


laplace_beta_numba = njit(_laplace_beta_loop)


def laplace_beta_numpy(v):
    w = v[1:, 0]
    inner = v[1:, 1:] @ w - np.diag(v)[1:] * w
    return float(v[0, 1:] @ inner)


def laplace_beta(v):
    """sum_{j>=2} v_1j sum_{j'>=2, j'!=j} v_jj' v_j'1 (0-based site 0 = site 1)."""
    arr = np.ascontiguousarray(v, dtype=np.float64)
    if USE_NUMBA:
        return float(laplace_beta_numba(arr))
    return laplace_beta_numpy(arr)


def _bh_ratio_loop(z, spacing, delta_j, delta_eps, b0, k, m0, u, kinetic, thermal):
    n = z.shape[0]
    j_over_u = np.empty(n)
    eps_over_u = np.empty(n)
    for i in range(n):
        d = spacing[i]
        decay = np.exp(-k * z[i])
        gauss = np.exp(-d * d)
        j = d * (b0 * decay + delta_j[i]) * gauss
        if kinetic:
            j += d * (1.0 - d * d) / (2.0 * m0) * gauss
        j_over_u[i] = j * thermal / u
        eps_over_u[i] = (b0 + delta_eps[i]) * decay / u
    return j_over_u, eps_over_u


bh_ratio_numba = njit(_bh_ratio_loop)


def bh_ratio_numpy(z, spacing, delta_j, delta_eps, b0, k, m0, u, kinetic, thermal):
    decay = np.exp(-k * z)
    gauss = np.exp(-spacing * spacing)
    j = spacing * (b0 * decay + delta_j) * gauss
    if kinetic:
        j = j + spacing * (1.0 - spacing * spacing) / (2.0 * m0) * gauss
    return j * thermal / u, (b0 + delta_eps) * decay / u


def bh_ratio(z, spacing, delta_j, delta_eps, b0, k, m0, u, kinetic=False, thermal=1.0):
    """Elementwise (J/U, eps/U) for flattened grids.

    ``spacing`` is the dimensionless site spacing entering the Gaussian
    overlap; ``thermal`` multiplies J (exp(-beta*Delta_U) factor).
    """
    args = [np.ascontiguousarray(a, dtype=np.float64) for a in (z, spacing, delta_j, delta_eps)]
    fn = bh_ratio_numba if USE_NUMBA else bh_ratio_numpy
    return fn(*args, float(b0), float(k), float(m0), float(u), bool(kinetic), float(thermal))


def _finger_potential_loop(x, z, t, k, lam, v, volts, b0, n_units):
    n = x.shape[0]
    out = np.zeros(n)
    for i in range(n):
        decay = b0 * np.exp(-k * z[i])
        acc = 0.0
        for finger in range(3):
            vj = volts[finger]
            if vj == 0.0:
                continue
            for m in range(n_units):
                # unit m sits one period further along; cos is lam-periodic
                phase = k * (x[i] - finger * lam / 3.0 - m * lam - v * t[i])
                acc += vj * decay * np.cos(phase)
        out[i] = acc
    return out


finger_potential_numba = njit(_finger_potential_loop)


def finger_potential_numpy(x, z, t, k, lam, v, volts, b0, n_units):
    decay = b0 * np.exp(-k * z)
    acc = np.zeros(np.broadcast(x, z, t).shape)
    for finger in range(3):
        if volts[finger] == 0.0:
            continue
        for m in range(n_units):
            phase = k * (x - finger * lam / 3.0 - m * lam - v * t)
            acc = acc + volts[finger] * decay * np.cos(phase)
    return acc


def finger_potential(x, z, t, k, lam, v, volts, b0, n_units):
    """Three-phase finger superposition Re[B0 e^{-kz} e^{ik(x - j lam/3 - vt)}]."""
    x, z, t = np.broadcast_arrays(
        np.asarray(x, dtype=np.float64), np.asarray(z, dtype=np.float64), np.asarray(t, dtype=np.float64)
    )
    shape = x.shape
    volts = np.ascontiguousarray(volts, dtype=np.float64)
    if USE_NUMBA:
        flat = finger_potential_numba(
            np.ascontiguousarray(x.ravel()),
            np.ascontiguousarray(z.ravel()),
            np.ascontiguousarray(t.ravel()),
            float(k),
            float(lam),
            float(v),
            volts,
            float(b0),
            int(n_units),
        )
        return flat.reshape(shape)
    return finger_potential_numpy(x, z, t, float(k), float(lam), float(v), volts, float(b0), int(n_units))
