import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    # -ffp-contract=off keeps the compiled core bit-compatible with the
    # NumPy fallback (no fused multiply-add in the recurrences).
    ext_modules = cythonize(
        [
            Extension(
                "qprobe._core",
                sources=["src/qprobe/_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
else:
    ext_modules = []  # pure-Python install; qprobe._backend falls back to NumPy

setup(ext_modules=ext_modules)
