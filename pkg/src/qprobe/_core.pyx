# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: the double-quadrature dephasing oracle, stationary
Ornstein-Uhlenbeck path updates, and trapezoidal phase accumulation.

`qprobe._backend` loads this module when the extension was built and falls
back to the NumPy versions in `qprobe._fallback` otherwise.  Signatures and
results (up to summation-order rounding) match the fallback.
"""
from libc.math cimport exp, expm1, pow, sqrt

BACKEND = "compiled"

cdef double INV_SQRT_PI = 0.5641895835477562869480794515607726


cdef inline double _kernel(int kind, double alpha, double g, double u) noexcept nogil:
    # Stationary autocorrelation at nonnegative lag u (damping-rate units).
    cdef double t
    if kind == 0:
        return 0.5 * g * exp(-g * u)
    if kind == 1:
        t = g * u
        return g * INV_SQRT_PI * exp(-t * t)
    t = g * u + 1.0
    if alpha == 3.0:
        return g / (t * t * t)
    return 0.5 * (alpha - 1.0) * g * pow(t, -alpha)


def quad_beta(int kind, double alpha, double g, double tau, int n, int rule):
    """Double quadrature of the kernel over the square [0, tau]^2.

    The integrand depends on s - s' only and is even in it, so the square is
    folded onto the triangle s' <= s (factor 2); inside the triangle the lag
    is nonnegative and the integrand smooth.  `rule` 0 is composite midpoint,
    1 composite Simpson, with `n` subdivisions per axis.
    """
    cdef double h_out, h_in, s, acc, inner, w
    cdef Py_ssize_t i, j
    if tau <= 0.0:
        return 0.0
    acc = 0.0
    h_out = tau / n
    if rule == 1:
        with nogil:
            for i in range(1, n + 1):
                s = i * h_out
                h_in = s / n
                inner = _kernel(kind, alpha, g, s) + _kernel(kind, alpha, g, 0.0)
                for j in range(1, n):
                    inner += (4.0 if (j & 1) else 2.0) * _kernel(kind, alpha, g, (n - j) * h_in)
                inner *= h_in / 3.0
                w = 1.0 if i == n else (4.0 if (i & 1) else 2.0)
                acc += w * inner
        return 2.0 * acc * (h_out / 3.0)
    with nogil:
        for i in range(n):
            s = (i + 0.5) * h_out
            h_in = s / n
            inner = 0.0
            for j in range(n):
                inner += _kernel(kind, alpha, g, (n - j - 0.5) * h_in)
            acc += inner * h_in
    return 2.0 * acc * h_out


def ou_paths_inplace(double[:, ::1] buf, double g, double dt):
    """Turn rows of standard-normal draws into stationary OU paths in place.

    buf[i, 0] seeds the stationary marginal N(0, g/2); subsequent columns
    apply the exact autoregressive update with decay exp(-g*dt).
    """
    cdef double var = 0.5 * g
    cdef double decay = exp(-g * dt)
    cdef double scale = sqrt(var * (-expm1(-2.0 * g * dt)))
    cdef double s0 = sqrt(var)
    cdef Py_ssize_t i, k, nrow = buf.shape[0], ncol = buf.shape[1]
    cdef double b
    with nogil:
        for i in range(nrow):
            b = s0 * buf[i, 0]
            buf[i, 0] = b
            for k in range(1, ncol):
                b = decay * b + scale * buf[i, k]
                buf[i, k] = b


def trapezoid_phases(double[:, ::1] samples, Py_ssize_t n_pts, double dt, double[::1] out):
    """Trapezoidal integral of each row over its first n_pts samples."""
    cdef Py_ssize_t i, k, nrow = samples.shape[0]
    cdef double acc
    with nogil:
        for i in range(nrow):
            acc = 0.5 * (samples[i, 0] + samples[i, n_pts - 1])
            for k in range(1, n_pts - 1):
                acc += samples[i, k]
            out[i] = acc * dt
