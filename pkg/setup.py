"""Build script: compiles the coordinate-descent kernel when Cython is available.

The package works without the compiled extension (a pure-numpy fallback is
selected at import time), so the build degrades gracefully.
"""
from setuptools import setup

ext_modules = None
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/survitmle/solvers/_cd_kernel.pyx"],
        language_level=3,
    )
    include_dirs = [numpy.get_include()]
except ImportError:
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
