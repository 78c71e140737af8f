"""Chain of stacked molecule layers: binding energy, per-layer widths and
the Gaussian variational density.

Layer indices in the public API are 1-based, matching the usual l = 1..L
labelling of the stack from the bottom.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CoincidentSitesError


@dataclass(frozen=True)
class LayerStack:
    heights: tuple
    mass: float = 1.0
    trap_frequency: float = 1.0
    alpha: float = 8.0
    R0: float = 0.04
    xi: float = 0.01
    # set by ``uniform``: separations are then exact multiples of the spacing,
    # so mirror-image attraction sums cancel bit-for-bit
    spacing: float = None

    def __post_init__(self):
        h = tuple(float(v) for v in self.heights)
        object.__setattr__(self, "heights", h)
        if len(h) < 2:
            raise ValueError("a stack needs at least two layers")
        if not self.alpha > 0 or not self.R0 > 0:
            raise ValueError("alpha and R0 must be positive")
        for i in range(len(h) - 1):
            if h[i + 1] == h[i]:
                raise CoincidentSitesError(i + 1, i + 2)
            if h[i + 1] < h[i]:
                raise ValueError("heights must be strictly increasing")
        if self.spacing is not None:
            expected = h[0] + self.spacing * np.arange(len(h))
            if not np.allclose(h, expected, rtol=1e-12, atol=1e-15):
                raise ValueError("heights are not uniform with the given spacing")

    @property
    def size(self):
        return len(self.heights)

    @classmethod
    def uniform(cls, n, bottom, spacing, **kw):
        return cls(tuple(bottom + i * spacing for i in range(n)), spacing=spacing, **kw)

    def separation(self, q, l):
        """z_q - z_l for 1-based layer indices."""
        if self.spacing is not None:
            return (q - l) * self.spacing
        return self.heights[q - 1] - self.heights[l - 1]


def binding_energy(stack: LayerStack):
    """-sum over ordered pairs q != l of exp(-alpha (z_q - z_l)^2)."""
    if stack.spacing is not None:
        i = np.arange(stack.size)
        d = (i[:, None] - i[None, :]) * stack.spacing
    else:
        z = np.asarray(stack.heights)
        d = z[:, None] - z[None, :]
    w = np.exp(-stack.alpha * d * d)
    return -(w.sum() - np.trace(w))


def oscillation_width(stack: LayerStack, l):
    """R_l = R0 (1 + xi |sum_{q>l} |z_q-z_l|^-2 - sum_{q<l} |z_q-z_l|^-2|)."""
    L = stack.size
    if not 1 <= l <= L:
        raise IndexError(f"layer index must lie in 1..{L}, got {l}")
    up = down = 0.0
    for q in range(1, L + 1):
        if q == l:
            continue
        d = stack.separation(q, l)
        if d == 0.0:
            raise CoincidentSitesError(l, q)
        if q > l:
            up += 1.0 / (d * d)
        else:
            down += 1.0 / (d * d)
    return stack.R0 * (1.0 + stack.xi * abs(up - down))


def oscillation_widths(stack: LayerStack):
    return np.array([oscillation_width(stack, l) for l in range(1, stack.size + 1)])


def variational_density(stack: LayerStack, widths, radii):
    """|psi_L|^2 = prod_l exp(-r_l^2 / R_l^2) / (pi R_l^2)."""
    R = np.asarray(widths, dtype=float)
    r = np.asarray(radii, dtype=float)
    if R.shape != (stack.size,) or r.shape[-1] != stack.size:
        raise ValueError("need one width and one radius per layer")
    if np.any(R <= 0):
        raise ValueError("widths must be positive")
    return np.prod(np.exp(-(r * r) / (R * R)) / (np.pi * R * R), axis=-1)


def chain_energy(stack: LayerStack, momenta, positions, pair_potential=None):
    """H_L = sum (P^2/2m + m w^2 r^2/2) + 1/2 sum_{q!=l} V_{|q-l|}(|z_q - z_l|).

    ``pair_potential`` is either a callable of the height separation, used
    for every order, or a mapping ``{order: callable}`` keyed by |q - l|.
    ``None`` means no interaction.
    """
    P = np.asarray(momenta, dtype=float)
    r = np.asarray(positions, dtype=float)
    if P.shape != (stack.size,) or r.shape != (stack.size,):
        raise ValueError("momenta and positions need one entry per layer")
    m, w = stack.mass, stack.trap_frequency
    e = float(np.sum(P * P / (2.0 * m) + 0.5 * m * w * w * r * r))
    if pair_potential is None:
        return e
    z = stack.heights
    pair = 0.0
    for q in range(stack.size):
        for l in range(stack.size):
            if q != l:
                V = pair_potential if callable(pair_potential) else pair_potential[abs(q - l)]
                pair += V(abs(z[q] - z[l]))
    return e + 0.5 * pair
