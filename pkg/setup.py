"""Build script: compiles the optional Cython kernel core.

The package works without the extension (a pure numpy fallback is selected
at import time), so a failed cythonize is downgraded to a warning.
"""

import warnings

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "hejhal_lab._kernels_cy",
                ["src/hejhal_lab/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-ffast-math"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    warnings.warn(f"Cython extension not built ({exc}); using pure python kernels")
    ext_modules = []

setup(ext_modules=ext_modules)
