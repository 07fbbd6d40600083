"""Fisher information, quantum Fisher information, and QSNR optimization.

For the dephased qubit the QFI for the noise parameter g has the closed form

    H(g, tau) = 4 sin^2(theta) (d beta/d g)^2 / (exp(4 beta) - 1),

maximized by the equatorial preparation theta = pi/2, where it is attained
by the rotating-frame sigma_x measurement (its Fisher information equals H).
The quantum signal-to-noise ratio R = g^2 H has, at fixed g, a single
interior maximum over the interaction time; ``optimal_time`` locates it by
bracketing plus golden-section refinement, and ``scaling_fit`` extracts the
asymptotic laws of the optimum against g.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import DephasedQubit
from .kernels import AdimensionalPoint, NoiseKernel, beta, dbeta_dg

__all__ = [
    "MetrologyPoint",
    "OptimalPoint",
    "QfiNumericResult",
    "ScalingFit",
    "BracketingError",
    "qfi",
    "qfi_numeric",
    "fisher_information",
    "qsnr",
    "qsnr_ou_reference",
    "metrology_point",
    "optimal_time",
    "scaling_fit",
]

HALF_PI = 0.5 * math.pi

# beyond this the QFI denominator exp(4*beta) - 1 overflows; the QFI itself
# is indistinguishable from zero there
_BETA_OVERFLOW = 700.0

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

# fit-regime boundaries for the asymptotic scaling laws
SMALL_G_MAX = 1e-2
LARGE_G_MIN = 1e2


class BracketingError(RuntimeError):
    """Raised when no interior QSNR maximum could be bracketed."""


@dataclass(frozen=True)
class MetrologyPoint:
    """(g, tau) with the three information measures evaluated there."""

    g: float
    tau: float
    qfi: float
    fi: float
    qsnr: float


@dataclass(frozen=True)
class OptimalPoint:
    """QSNR maximizer over the interaction time at fixed g."""

    g: float
    tau_m: float
    r_m: float
    iterations: int


@dataclass(frozen=True)
class QfiNumericResult:
    """Numeric QFI decomposition: classical eigenvalue term plus the
    eigenvector-rotation term (zero when the eigenvectors carry no parameter
    dependence).  ``degenerate`` flags a skipped eigenvector term."""

    value: float
    classical_term: float
    eigenvector_term: float
    degenerate: bool


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of an asymptotic law.

    model "power_law": coefficients = (exponent, prefactor) of y = A * g^e,
    fitted in log-log space.  model "sqrt_linear": coefficients =
    (intercept, slope) of y = a + b * sqrt(g).  ``residual`` is the RMS
    residual in the fit space; ``mixed_regime`` warns that it exceeds the
    single-regime threshold.
    """

    model: str
    coefficients: tuple[float, float]
    residual: float
    mixed_regime: bool


def qfi(kernel: NoiseKernel, point: AdimensionalPoint, theta: float = HALF_PI) -> float:
    """Quantum Fisher information for g; zero in the tau -> 0 limit."""
    if point.tau == 0.0:
        return 0.0
    b = beta(kernel, point)
    if 4.0 * b > _BETA_OVERFLOW:
        return 0.0
    db = dbeta_dg(kernel, point)
    s = math.sin(theta)
    return 4.0 * s * s * db * db / math.expm1(4.0 * b)


def fisher_information(kernel: NoiseKernel, point: AdimensionalPoint) -> float:
    """Fisher information of the rotating-frame sigma_x outcome statistics,
    computed from the binary distribution; equals qfi(..., theta=pi/2)."""
    if point.tau == 0.0:
        return 0.0
    b = beta(kernel, point)
    if 4.0 * b > _BETA_OVERFLOW:
        return 0.0
    dp = math.exp(-2.0 * b) * dbeta_dg(kernel, point)
    pp = -0.25 * math.expm1(-4.0 * b)  # p_plus * p_minus
    if pp == 0.0:
        return 0.0
    return dp * dp / pp


def qsnr(kernel: NoiseKernel, point: AdimensionalPoint) -> float:
    """Quantum signal-to-noise ratio R = g^2 * H at the optimal theta."""
    return point.g * point.g * qfi(kernel, point)


def qsnr_ou_reference(point: AdimensionalPoint) -> float:
    """Explicit OU QSNR closed form, kept as an independent transcription for
    identity checks against the g^2 * qfi composition.  The numerator is
    grouped as (exp(-x)*(1+x) - 1)^2 so it stays representable at large x."""
    g, tau = point.g, point.tau
    if tau == 0.0:
        return 0.0
    x = g * tau
    a = math.exp(-x) * (1.0 + x) - 1.0
    four_beta = 4.0 * (tau + math.expm1(-x) / g)
    if four_beta > _BETA_OVERFLOW:
        return 0.0
    return 4.0 * a * a / (g * g * math.expm1(four_beta))


def metrology_point(kernel: NoiseKernel, point: AdimensionalPoint) -> MetrologyPoint:
    h = qfi(kernel, point)
    return MetrologyPoint(
        g=point.g,
        tau=point.tau,
        qfi=h,
        fi=fisher_information(kernel, point),
        qsnr=point.g * point.g * h,
    )


def _eigh_point(kernel: NoiseKernel, g: float, tau: float, theta: float):
    rho = DephasedQubit(
        theta=theta,
        phase=1.4 * tau,  # arbitrary fixed nonzero qubit energy; H is blind to it
        beta=beta(kernel, AdimensionalPoint(g, tau)),
    ).matrix()
    return np.linalg.eigh(rho)


def qfi_numeric(
    kernel: NoiseKernel,
    point: AdimensionalPoint,
    theta: float = HALF_PI,
    fd_step: float = 1e-3,
) -> QfiNumericResult:
    """QFI from the numeric eigensystem of the density matrix.

    Both contributions of the eigen-decomposition formula are evaluated with
    Richardson-extrapolated central differences at g*fd_step: the classical
    term sum (dp_n/dg)^2 / p_n over the eigenvalues, and the eigenvector term
    2 sum_{n != m} (p_n - p_m)^2/(p_n + p_m) |<p_m | d/dg p_n>|^2.  The
    eigenvector overlaps are taken as gauge-free magnitudes.  Serves as the
    independent oracle for :func:`qfi`.
    """
    g, tau = point.g, point.tau
    if tau <= 0.0:
        raise ValueError("qfi_numeric requires tau > 0")
    p0, v0 = _eigh_point(kernel, g, tau, theta)
    gap = abs(p0[1] - p0[0])
    degenerate = gap < 1e-13

    def terms(delta: float) -> tuple[float, float]:
        pp, vp = _eigh_point(kernel, g + delta, tau, theta)
        pm, vm = _eigh_point(kernel, g - delta, tau, theta)
        dp = (pp - pm) / (2.0 * delta)
        classical = float(np.sum(dp * dp / p0))
        vec = 0.0
        if not degenerate:
            for n_idx, m_idx in ((0, 1), (1, 0)):
                hi = abs(np.vdot(v0[:, m_idx], vp[:, n_idx]))
                lo = abs(np.vdot(v0[:, m_idx], vm[:, n_idx]))
                d_nm = (hi + lo) / (2.0 * delta)
                w = (p0[n_idx] - p0[m_idx]) ** 2 / (p0[n_idx] + p0[m_idx])
                vec += 2.0 * w * d_nm * d_nm
        return classical, vec

    delta = fd_step * g
    c1, e1 = terms(delta)
    c2, e2 = terms(0.5 * delta)
    classical = (4.0 * c2 - c1) / 3.0
    vec_term = (4.0 * e2 - e1) / 3.0
    if degenerate:
        vec_term = 0.0
    return QfiNumericResult(
        value=classical + vec_term,
        classical_term=classical,
        eigenvector_term=vec_term,
        degenerate=degenerate,
    )


def optimal_time(kernel: NoiseKernel, g: float, tol: float = 1e-8) -> OptimalPoint:
    """Maximize tau -> QSNR(g, tau): geometric bracketing from tau = 1/sqrt(g)
    followed by golden-section refinement to relative width ``tol``."""
    if g <= 0.0:
        raise ValueError(f"g must be positive, got {g!r}")

    def f(tau: float) -> float:
        return qsnr(kernel, AdimensionalPoint(g, tau))

    b = 1.0 / math.sqrt(g)
    a, c = 0.5 * b, 2.0 * b
    fa, fb, fc = f(a), f(b), f(c)
    steps = 0
    while not (fb > fa and fb > fc):
        if fa >= fb:
            c, fc = b, fb
            b, fb = a, fa
            a *= 0.5
            fa = f(a)
        else:
            a, fa = b, fb
            b, fb = c, fc
            c *= 2.0
            fc = f(c)
        steps += 1
        if steps > 200:
            raise BracketingError(
                f"no interior QSNR maximum bracketed for kernel "
                f"'{kernel.label}' at g = {g!r} after {steps} expansions"
            )
    x1 = c - _INV_GOLDEN * (c - a)
    x2 = a + _INV_GOLDEN * (c - a)
    f1, f2 = f(x1), f(x2)
    while (c - a) > tol * c:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_GOLDEN * (c - a)
            f2 = f(x2)
        else:
            c, x2, f2 = x2, x1, f1
            x1 = c - _INV_GOLDEN * (c - a)
            f1 = f(x1)
        steps += 1
    tau_m = 0.5 * (a + c)
    return OptimalPoint(g=g, tau_m=tau_m, r_m=f(tau_m), iterations=steps)


# residual thresholds separating a clean asymptotic regime from mixed input
_POWER_LAW_RESIDUAL_WARN = 0.02
_SQRT_LINEAR_RESIDUAL_WARN = 2e-3


def scaling_fit(kernel: NoiseKernel, g_values, quantity: str) -> ScalingFit:
    """Fit the asymptotic law of the QSNR optimum against g.

    quantity "tau_m" uses the power-law model everywhere; "r_m" uses the
    linear-in-sqrt(g) model when every g lies in the small-g regime
    (g <= 1e-2) and the power-law model otherwise.  Requires at least five
    g values spanning at least two decades.
    """
    if quantity not in ("tau_m", "r_m"):
        raise ValueError(f"quantity must be 'tau_m' or 'r_m', got {quantity!r}")
    gs = np.sort(np.asarray(list(g_values), dtype=float))
    if gs.size < 5:
        raise ValueError("need at least 5 g values for a scaling fit")
    if gs[-1] < 100.0 * gs[0]:
        raise ValueError("g values must span at least two decades")
    opts = [optimal_time(kernel, g) for g in gs]
    y = np.array([o.tau_m if quantity == "tau_m" else o.r_m for o in opts])
    if quantity == "r_m" and gs[-1] <= SMALL_G_MAX:
        design = np.column_stack([np.ones_like(gs), np.sqrt(gs)])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        resid = y - design @ coef
        rms = float(np.sqrt(np.mean(resid * resid)))
        return ScalingFit(
            model="sqrt_linear",
            coefficients=(float(coef[0]), float(coef[1])),
            residual=rms,
            mixed_regime=rms > _SQRT_LINEAR_RESIDUAL_WARN * abs(float(coef[0])),
        )
    design = np.column_stack([np.ones_like(gs), np.log(gs)])
    coef, *_ = np.linalg.lstsq(design, np.log(y), rcond=None)
    resid = np.log(y) - design @ coef
    rms = float(np.sqrt(np.mean(resid * resid)))
    return ScalingFit(
        model="power_law",
        coefficients=(float(coef[1]), float(math.exp(coef[0]))),
        residual=rms,
        mixed_regime=rms > _POWER_LAW_RESIDUAL_WARN,
    )
