"""Parity between the compiled core and the NumPy fallback."""
import os
import subprocess
import sys

import numpy as np
import pytest

core = pytest.importorskip("qprobe._core")
from qprobe import _fallback  # noqa: E402


CASES = [
    (0, 0.0, 1.0, 1.0, 128),
    (0, 0.0, 37.0, 0.3, 130),
    (1, 0.0, 1.0, 2.0, 64),
    (2, 3.0, 0.05, 4.0, 96),
    (2, 2.4, 5.0, 0.7, 96),
]


@pytest.mark.parametrize("kind, alpha, g, tau, n", CASES)
@pytest.mark.parametrize("rule", [0, 1])
def test_quad_beta_parity(kind, alpha, g, tau, n, rule):
    a = core.quad_beta(kind, alpha, g, tau, n, rule)
    b = _fallback.quad_beta(kind, alpha, g, tau, n, rule)
    assert b == pytest.approx(a, rel=1e-12)


def test_ou_paths_bitwise_parity():
    rng = np.random.default_rng(101)
    draws = rng.standard_normal((80, 600))
    a, b = draws.copy(), draws.copy()
    core.ou_paths_inplace(a, 2.5, 1e-3)
    _fallback.ou_paths_inplace(b, 2.5, 1e-3)
    assert np.array_equal(a, b)


def test_trapezoid_phase_parity():
    rng = np.random.default_rng(102)
    samples = rng.standard_normal((60, 500))
    a, b = np.empty(60), np.empty(60)
    core.trapezoid_phases(samples, 500, 1e-3, a)
    _fallback.trapezoid_phases(samples, 500, 1e-3, b)
    # summation order differs between the backends
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)
    core.trapezoid_phases(samples, 2, 1e-3, a)
    _fallback.trapezoid_phases(samples, 2, 1e-3, b)
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_force_python_env_selects_fallback():
    env = dict(os.environ, QPROBE_FORCE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import qprobe; print(qprobe.BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
    )
    assert out.stdout.strip() == "python"


def test_default_import_prefers_compiled():
    env = {k: v for k, v in os.environ.items() if k != "QPROBE_FORCE_PYTHON"}
    out = subprocess.run(
        [sys.executable, "-c", "import qprobe; print(qprobe.BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
    )
    assert out.stdout.strip() == "compiled"


def test_fallback_library_results_match(tmp_path):
    # a full library computation must agree across backends
    script = (
        "import qprobe as q\n"
        "ens = q.sample_trajectories(q.NoiseKernel.ou(), 1.0, 200, 1e-3, 300, 7)\n"
        "est = q.coherence_monte_carlo(ens, 0.2)\n"
        "print(repr(est.modulus))\n"
    )
    results = {}
    for force in ("0", "1"):
        env = dict(os.environ, QPROBE_FORCE_PYTHON=force) if force == "1" else {
            k: v for k, v in os.environ.items() if k != "QPROBE_FORCE_PYTHON"
        }
        out = subprocess.run(
            [sys.executable, "-c", script], capture_output=True, text=True, env=env
        )
        assert out.returncode == 0, out.stderr
        results[force] = float(out.stdout.strip())
    assert results["0"] == pytest.approx(results["1"], rel=1e-12)
