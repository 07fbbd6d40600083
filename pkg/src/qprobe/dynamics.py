"""Dephased qubit states and the stochastic-trajectory oracle.

A qubit prepared in a polar-angle superposition and exposed to a classical
stationary Gaussian field keeps its populations but loses off-diagonal
coherence as exp(-2*beta(g, tau)).  This module builds the evolved 2x2
density matrix, exposes its exact eigensystem and measurement statistics,
and provides a Monte Carlo check of the dephasing law: sample field
trajectories, accumulate the stochastic phase per trajectory, and compare
the ensemble-averaged coherence against the closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from . import _backend
from .kernels import AdimensionalPoint, KernelKind, NoiseKernel, beta, kernel_value

__all__ = [
    "ProbeState",
    "DephasedQubit",
    "EigenSystem",
    "TrajectoryEnsemble",
    "CoherenceEstimate",
    "CovarianceFactorizationError",
    "evolve",
    "eigensystem",
    "outcome_probabilities",
    "sample_trajectories",
    "coherence_monte_carlo",
    "default_step",
]

# covariance jitter ramp: start at 1e-12 * max diagonal, double while <= 1e-8
_JITTER_START = 1e-12
_JITTER_LIMIT = 1e-8


class CovarianceFactorizationError(RuntimeError):
    """Raised when the trajectory covariance cannot be factorized even after
    the maximum diagonal jitter."""


@dataclass(frozen=True)
class ProbeState:
    """Initial pure qubit state cos(theta/2)|0> + sin(theta/2)|1> with
    energy splitting omega0."""

    theta: float
    omega0: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.theta < math.pi):
            raise ValueError(f"theta must lie strictly inside (0, pi), got {self.theta!r}")


@dataclass(frozen=True)
class DephasedQubit:
    """Evolved qubit state: populations (1 +- cos(theta))/2 stay put, the
    off-diagonal carries phase exp(-i*phase) (phase = 2*omega0*t) and is
    damped by exp(-2*beta)."""

    theta: float
    phase: float
    beta: float

    def matrix(self) -> np.ndarray:
        c = 0.5 * math.sin(self.theta) * math.exp(-2.0 * self.beta)
        off = c * complex(math.cos(self.phase), -math.sin(self.phase))
        return np.array(
            [
                [0.5 * (1.0 + math.cos(self.theta)), off],
                [off.conjugate(), 0.5 * (1.0 - math.cos(self.theta))],
            ],
            dtype=complex,
        )

    @property
    def off_diagonal_modulus(self) -> float:
        return 0.5 * math.sin(self.theta) * math.exp(-2.0 * self.beta)


@dataclass(frozen=True)
class EigenSystem:
    """Exact eigensystem of a dephased qubit.  The eigenvectors are the
    spin states along the Bloch axis with polar angle ``mixing`` and azimuth
    ``phase``; for theta = pi/2 the mixing is pi/2 and they reduce to
    (|0> +- exp(i*phase)|1>)/sqrt(2)."""

    p_plus: float
    p_minus: float
    phase: float
    mixing: float

    def vectors(self) -> np.ndarray:
        """Column eigenvectors (+, -)."""
        half = 0.5 * self.mixing
        e = complex(math.cos(self.phase), math.sin(self.phase))
        return np.array(
            [
                [math.cos(half), -math.sin(half)],
                [e * math.sin(half), e * math.cos(half)],
            ],
            dtype=complex,
        )


def evolve(probe: ProbeState, kernel: NoiseKernel, point: AdimensionalPoint) -> DephasedQubit:
    """Average the unitary dephasing evolution over the Gaussian field."""
    return DephasedQubit(
        theta=probe.theta,
        phase=2.0 * probe.omega0 * point.tau,
        beta=beta(kernel, point),
    )


def eigensystem(state: DephasedQubit) -> EigenSystem:
    coher = math.exp(-2.0 * state.beta)
    cz = math.cos(state.theta)
    cxy = coher * math.sin(state.theta)
    r = math.hypot(cz, cxy)
    return EigenSystem(
        p_plus=0.5 * (1.0 + r),
        p_minus=0.5 * (1.0 - r),
        phase=state.phase,
        mixing=math.atan2(cxy, cz),
    )


def outcome_probabilities(kernel: NoiseKernel, point: AdimensionalPoint) -> tuple[float, float]:
    """(p_plus, p_minus) for the optimal rotating-frame sigma_x measurement on
    the theta = pi/2 preparation; p_plus + p_minus == 1 exactly."""
    p_minus = -0.5 * math.expm1(-2.0 * beta(kernel, point))
    return 1.0 - p_minus, p_minus


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Sampled field trajectories: ``samples[i, k]`` is trajectory i at time
    k*dt (n_steps + 1 points per row).  ``seed`` is the 64-bit base seed;
    trajectory i uses the spawned substream (seed, spawn_key=(i,))."""

    kernel: NoiseKernel
    g: float
    dt: float
    samples: np.ndarray
    seed: int

    @property
    def n_traj(self) -> int:
        return self.samples.shape[0]

    @property
    def n_steps(self) -> int:
        return self.samples.shape[1] - 1

    @property
    def duration(self) -> float:
        return self.n_steps * self.dt


@dataclass(frozen=True)
class CoherenceEstimate:
    modulus: float
    std_error: float
    n_traj: int


def default_step(g: float, tau: float, max_steps: int | None = None) -> tuple[int, float]:
    """Default discretization for trajectory sampling: step 1e-3 * min(1, 1/g)
    so the kernel correlation time is resolved by >= 100 steps, rounded so an
    integer number of steps covers tau exactly.  ``max_steps`` caps the grid
    (used for the dense-covariance kernels)."""
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    dt0 = 1e-3 * min(1.0, 1.0 / g)
    n = max(2, math.ceil(tau / dt0))
    if max_steps is not None and n > max_steps:
        n = max_steps
    return n, tau / n


def _cholesky_with_jitter(cov: np.ndarray, kernel: NoiseKernel, n_pts: int) -> np.ndarray:
    max_diag = float(np.max(np.diag(cov)))
    jitter = 0.0
    while True:
        try:
            return np.linalg.cholesky(
                cov if jitter == 0.0 else cov + jitter * np.eye(n_pts)
            )
        except np.linalg.LinAlgError:
            jitter = _JITTER_START * max_diag if jitter == 0.0 else 2.0 * jitter
            if jitter > _JITTER_LIMIT * max_diag:
                raise CovarianceFactorizationError(
                    f"covariance factorization failed for kernel "
                    f"'{kernel.label}' on a {n_pts} x {n_pts} grid "
                    f"(jitter exhausted at {jitter:.3e})"
                ) from None


def sample_trajectories(
    kernel: NoiseKernel,
    g: float,
    n_steps: int,
    dt: float,
    n_traj: int,
    seed: int,
    chunk: int = 1024,
) -> TrajectoryEnsemble:
    """Draw exact joint samples of the field on a uniform time grid.

    The OU kind uses the exact stationary autoregressive update; the Gaussian
    and power-law kinds factorize the dense grid covariance (Cholesky, with a
    diagonal jitter ramp).  Each trajectory consumes its own counter-based
    substream, so the ensemble is reproducible and independent of chunking.
    """
    if n_steps < 1 or n_traj < 1 or dt <= 0.0 or g <= 0.0:
        raise ValueError("need n_steps >= 1, n_traj >= 1, dt > 0, g > 0")
    n_pts = n_steps + 1
    samples = np.empty((n_traj, n_pts))
    children = np.random.SeedSequence(seed).spawn(n_traj)
    transform = None
    if kernel.kind is not KernelKind.OU:
        lags = np.arange(n_pts) * dt
        row = np.array([kernel_value(kernel, g, u) for u in lags])
        idx = np.arange(n_pts)
        cov = row[np.abs(idx[:, None] - idx[None, :])]
        # single-threaded BLAS: the factor of a near-singular covariance is
        # not reproducible across thread counts otherwise
        with threadpool_limits(limits=1):
            transform = _cholesky_with_jitter(cov, kernel, n_pts).T
    for lo in range(0, n_traj, chunk):
        hi = min(lo + chunk, n_traj)
        for i in range(lo, hi):
            samples[i] = np.random.Generator(np.random.Philox(children[i])).standard_normal(
                n_pts
            )
        if transform is None:
            _backend.ou_paths_inplace(samples[lo:hi], g, dt)
        else:
            with threadpool_limits(limits=1):
                samples[lo:hi] = samples[lo:hi] @ transform
    return TrajectoryEnsemble(kernel=kernel, g=g, dt=dt, samples=samples, seed=seed)


def coherence_monte_carlo(ensemble: TrajectoryEnsemble, tau: float) -> CoherenceEstimate:
    """Ensemble estimate of |<exp(2i*phi(tau))>| with a jackknife standard
    error; the dephasing law predicts exp(-2*beta(g, tau))."""
    if tau < 0.0:
        raise ValueError("tau must be nonnegative")
    n = ensemble.n_traj
    if tau == 0.0:
        return CoherenceEstimate(modulus=1.0, std_error=0.0, n_traj=n)
    steps = tau / ensemble.dt
    n_pts = int(round(steps)) + 1
    if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
        raise ValueError(f"tau = {tau!r} is not aligned with the dt grid")
    if n_pts > ensemble.samples.shape[1]:
        raise ValueError(f"tau = {tau!r} exceeds the sampled duration")
    phases = np.empty(n)
    _backend.trapezoid_phases(ensemble.samples, n_pts, ensemble.dt, phases)
    zr = np.cos(2.0 * phases)
    zi = np.sin(2.0 * phases)
    sr, si = zr.sum(), zi.sum()
    modulus = math.hypot(sr / n, si / n)
    if n < 2:
        return CoherenceEstimate(modulus=modulus, std_error=math.inf, n_traj=n)
    # jackknife over trajectories (leave-one-out moduli in one vectorized pass)
    loo = np.hypot((sr - zr) / (n - 1), (si - zi) / (n - 1))
    se = math.sqrt((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)))
    return CoherenceEstimate(modulus=modulus, std_error=se, n_traj=n)
