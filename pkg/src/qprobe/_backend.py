"""Backend selection: compiled extension when available, NumPy otherwise.

Set QPROBE_FORCE_PYTHON=1 before import to skip the compiled core (used by
the benchmark and the backend parity tests).
"""
import os

from . import _fallback

if os.environ.get("QPROBE_FORCE_PYTHON"):
    _impl = _fallback
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _fallback

BACKEND = _impl.BACKEND
quad_beta = _impl.quad_beta
ou_paths_inplace = _impl.ou_paths_inplace
trapezoid_phases = _impl.trapezoid_phases
