"""NumPy implementations of the compiled core, used when the extension is
unavailable or explicitly disabled (QPROBE_FORCE_PYTHON=1).

Same signatures and semantics as ``qprobe._core``; summation order differs,
so results may deviate from the compiled path at the last few ulps.
"""
import math

import numpy as np

BACKEND = "python"

_INV_SQRT_PI = 0.5641895835477562869480794515607726

# bound on the scratch block used to vectorize the quadrature double loop
_QUAD_BLOCK_ELEMENTS = 8_000_000


def _kernel_grid(kind, alpha, g, u):
    if kind == 0:
        return 0.5 * g * np.exp(-g * u)
    if kind == 1:
        t = g * u
        return g * _INV_SQRT_PI * np.exp(-t * t)
    t = g * u + 1.0
    if alpha == 3.0:
        return g / (t * t * t)
    return 0.5 * (alpha - 1.0) * g * t ** (-alpha)


def quad_beta(kind, alpha, g, tau, n, rule):
    """Double quadrature of the kernel over [0, tau]^2 (see qprobe._core)."""
    if tau <= 0.0:
        return 0.0
    h_out = tau / n
    if rule == 1:
        w_in = np.full(n + 1, 2.0)
        w_in[1::2] = 4.0
        w_in[0] = w_in[n] = 1.0
        w_out = w_in
        s = np.arange(n + 1) * h_out
        h_in = s / n
        # lag at inner node j of row i is (n - j) * h_in[i]
        lag_factors = np.arange(n, -1, -1, dtype=float)
        inner = np.empty(n + 1)
        block = max(1, _QUAD_BLOCK_ELEMENTS // (n + 1))
        for lo in range(0, n + 1, block):
            hi = min(lo + block, n + 1)
            u = h_in[lo:hi, None] * lag_factors[None, :]
            inner[lo:hi] = _kernel_grid(kind, alpha, g, u) @ w_in
        inner *= h_in / 3.0
        return 2.0 * float(w_out @ inner) * (h_out / 3.0)
    s = (np.arange(n) + 0.5) * h_out
    h_in = s / n
    lag_factors = np.arange(n, 0, -1, dtype=float) - 0.5
    inner = np.empty(n)
    block = max(1, _QUAD_BLOCK_ELEMENTS // n)
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        u = h_in[lo:hi, None] * lag_factors[None, :]
        inner[lo:hi] = _kernel_grid(kind, alpha, g, u).sum(axis=1)
    inner *= h_in
    return 2.0 * float(inner.sum()) * h_out


def ou_paths_inplace(buf, g, dt):
    """Stationary OU paths from standard-normal rows, in place.

    Elementwise operation order mirrors the compiled loop (multiply, multiply,
    add) so both backends produce bit-identical paths.
    """
    var = 0.5 * g
    decay = math.exp(-g * dt)
    scale = math.sqrt(var * (-math.expm1(-2.0 * g * dt)))
    buf[:, 0] *= math.sqrt(var)
    for k in range(1, buf.shape[1]):
        np.multiply(buf[:, k], scale, out=buf[:, k])
        buf[:, k] += decay * buf[:, k - 1]
    return None


def trapezoid_phases(samples, n_pts, dt, out):
    """Trapezoidal integral of each row over its first n_pts samples."""
    acc = 0.5 * (samples[:, 0] + samples[:, n_pts - 1])
    if n_pts > 2:
        acc += samples[:, 1 : n_pts - 1].sum(axis=1)
    np.multiply(acc, dt, out=out)
    return None
