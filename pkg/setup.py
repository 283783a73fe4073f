"""Build the optional Cython homomorphism-counting kernel.

The package works without the extension (a pure-Python fallback is selected
at import time); the build therefore degrades gracefully when Cython or a C
compiler is unavailable.
"""

from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    extensions = cythonize(
        [
            Extension(
                "motifcf._homcount",
                ["src/motifcf/_homcount.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": 3,
        },
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
