"""Stationary noise kernels and their dephasing exponents.

Three zero-mean Gaussian processes are supported, identified by their
autocorrelation function: Ornstein-Uhlenbeck (exponential), Gaussian, and
power law.  Everything is expressed in the dimensionless pair (g, tau):
g is the noise parameter in units of the fixed damping rate, tau the
interaction time in inverse damping-rate units.  Dimensional inputs are
normalized once, at construction of :class:`AdimensionalPoint`.

The dephasing exponent ``beta`` is the double time integral of the kernel
over [0, tau]^2; the qubit coherence decays as exp(-2*beta).  Closed forms,
their g-derivatives, and an independent quadrature oracle are provided.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import _backend

__all__ = [
    "KernelKind",
    "NoiseKernel",
    "AdimensionalPoint",
    "QuadratureSpec",
    "kernel_value",
    "beta",
    "beta_numeric",
    "dbeta_dg",
]

_SQRT_PI = math.sqrt(math.pi)

# below this value of g*tau the closed forms cancel catastrophically and a
# short series in g*tau is used instead
_SERIES_THRESHOLD = 1e-4


class KernelKind(enum.Enum):
    OU = "ou"
    GAUSSIAN = "gauss"
    POWER_LAW = "pl"


_KIND_CODES = {KernelKind.OU: 0, KernelKind.GAUSSIAN: 1, KernelKind.POWER_LAW: 2}
_RULE_CODES = {"midpoint": 0, "simpson": 1}


@dataclass(frozen=True)
class NoiseKernel:
    """A stationary autocorrelation kernel; ``alpha`` is the power-law
    exponent and is meaningful (and required, strictly > 2) only for
    :attr:`KernelKind.POWER_LAW`."""

    kind: KernelKind
    alpha: float | None = None

    def __post_init__(self):
        if not isinstance(self.kind, KernelKind):
            raise ValueError(f"kind must be a KernelKind, got {self.kind!r}")
        if self.kind is KernelKind.POWER_LAW:
            if self.alpha is None or not math.isfinite(self.alpha) or self.alpha <= 2.0:
                raise ValueError(
                    f"power-law kernel requires alpha > 2 strictly, got {self.alpha!r}"
                )
        elif self.alpha is not None:
            raise ValueError("alpha is only meaningful for the power-law kernel")

    @classmethod
    def ou(cls) -> "NoiseKernel":
        return cls(KernelKind.OU)

    @classmethod
    def gaussian(cls) -> "NoiseKernel":
        return cls(KernelKind.GAUSSIAN)

    @classmethod
    def power_law(cls, alpha: float) -> "NoiseKernel":
        return cls(KernelKind.POWER_LAW, float(alpha))

    @property
    def label(self) -> str:
        return self.kind.value

    @property
    def _code(self) -> int:
        return _KIND_CODES[self.kind]

    @property
    def _alpha(self) -> float:
        return 0.0 if self.alpha is None else self.alpha


@dataclass(frozen=True)
class AdimensionalPoint:
    """Dimensionless evaluation point: g > 0, tau >= 0."""

    g: float
    tau: float

    def __post_init__(self):
        if not (math.isfinite(self.g) and self.g > 0.0):
            raise ValueError(f"g must be positive and finite, got {self.g!r}")
        if not (math.isfinite(self.tau) and self.tau >= 0.0):
            raise ValueError(f"tau must be nonnegative and finite, got {self.tau!r}")

    @classmethod
    def from_dimensional(cls, gamma: float, damping_rate: float, t: float) -> "AdimensionalPoint":
        """Normalize a dimensional (noise parameter, damping rate, time)
        triple to (g, tau) = (gamma/damping_rate, damping_rate*t)."""
        if not (math.isfinite(damping_rate) and damping_rate > 0.0):
            raise ValueError(f"damping rate must be positive, got {damping_rate!r}")
        return cls(g=gamma / damping_rate, tau=damping_rate * t)


@dataclass(frozen=True)
class QuadratureSpec:
    """Deterministic double-quadrature settings: per-axis subdivision count
    and rule ("midpoint" or "simpson"; Simpson needs an even count)."""

    subdivisions: int = 512
    rule: str = "simpson"

    def __post_init__(self):
        if self.rule not in _RULE_CODES:
            raise ValueError(f"rule must be 'midpoint' or 'simpson', got {self.rule!r}")
        if self.subdivisions < 2:
            raise ValueError(f"subdivisions must be >= 2, got {self.subdivisions}")
        if self.rule == "simpson" and self.subdivisions % 2:
            raise ValueError("Simpson rule requires an even subdivision count")


def kernel_value(kernel: NoiseKernel, g: float, dt: float) -> float:
    """Autocorrelation K(dt) in damping-rate units; even in dt."""
    if not g > 0.0:
        raise ValueError(f"g must be positive, got {g!r}")
    u = abs(dt)
    if kernel.kind is KernelKind.OU:
        return 0.5 * g * math.exp(-g * u)
    if kernel.kind is KernelKind.GAUSSIAN:
        return g / _SQRT_PI * math.exp(-((g * u) ** 2))
    return 0.5 * (kernel.alpha - 1.0) * g * (g * u + 1.0) ** (-kernel.alpha)


def beta(kernel: NoiseKernel, point: AdimensionalPoint) -> float:
    """Closed-form dephasing exponent; nonnegative, zero iff tau == 0."""
    g, tau = point.g, point.tau
    x = g * tau
    if kernel.kind is KernelKind.OU:
        if x < _SERIES_THRESHOLD:
            return g * tau * tau * (0.5 + x * (-1.0 / 6.0 + x / 24.0))
        return (x + math.expm1(-x)) / g
    if kernel.kind is KernelKind.GAUSSIAN:
        if x < _SERIES_THRESHOLD:
            x2 = x * x
            return g * tau * tau / _SQRT_PI * (1.0 + x2 * (-1.0 / 6.0 + x2 / 30.0))
        return tau * math.erf(x) + math.expm1(-x * x) / (g * _SQRT_PI)
    a = kernel.alpha
    if x < _SERIES_THRESHOLD:
        return (
            (a - 1.0)
            * g
            * tau
            * tau
            * (0.5 + a * x * (-1.0 / 6.0 + (a + 1.0) * x / 24.0))
        )
    return (math.expm1((2.0 - a) * math.log1p(x)) + (a - 2.0) * x) / (g * (a - 2.0))


def dbeta_dg(kernel: NoiseKernel, point: AdimensionalPoint) -> float:
    """Closed-form derivative of :func:`beta` with respect to g; positive for
    tau > 0, zero in the tau -> 0 limit."""
    g, tau = point.g, point.tau
    x = g * tau
    t2 = tau * tau
    if kernel.kind is KernelKind.OU:
        if x < _SERIES_THRESHOLD:
            return t2 * (0.5 + x * (-1.0 / 3.0 + x / 8.0))
        return (1.0 - math.exp(-x) * (1.0 + x)) / (g * g)
    if kernel.kind is KernelKind.GAUSSIAN:
        if x < _SERIES_THRESHOLD:
            x2 = x * x
            return t2 / _SQRT_PI * (1.0 + x2 * (-0.5 + x2 / 6.0))
        e = math.exp(-x * x)
        return 2.0 * t2 * e / _SQRT_PI + (1.0 - e * (1.0 + 2.0 * x * x)) / (
            _SQRT_PI * g * g
        )
    a = kernel.alpha
    if x < _SERIES_THRESHOLD:
        return (a - 1.0) * t2 * (0.5 + a * x * (-1.0 / 3.0 + (a + 1.0) * x / 8.0))
    decay = math.exp((1.0 - a) * math.log1p(x))
    return (1.0 - decay * (1.0 + (a - 1.0) * x)) / (g * g * (a - 2.0))


def beta_numeric(
    kernel: NoiseKernel,
    point: AdimensionalPoint,
    quad: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Dephasing exponent by deterministic double quadrature of the kernel
    over [0, tau]^2; the independent oracle for :func:`beta`."""
    if point.tau == 0.0:
        return 0.0
    return _backend.quad_beta(
        kernel._code,
        kernel._alpha,
        point.g,
        point.tau,
        quad.subdivisions,
        _RULE_CODES[quad.rule],
    )
