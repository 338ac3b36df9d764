"""Build script: compiles the optional fast-kernel extension.

The package works without the extension (a pure-Python backend is selected
at import time); compilation failures therefore degrade to a warning.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "htg_eval._kernels._core",
                sources=["src/htg_eval/_kernels/_core.pyx"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    warnings.warn(f"fast-kernel extension not built ({exc}); using pure-Python backend")

setup(ext_modules=ext_modules)
