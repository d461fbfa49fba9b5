"""Build script for the optional compiled kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a missing Cython or a failed compile must not break the
install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "adlens._core._pairgrad",
                ["src/adlens/_core/_pairgrad.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
