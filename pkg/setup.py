"""Build the optional compiled kernels; the package still works without them."""

import os
import sys

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install
    cythonize = None


def _extensions():
    if cythonize is None or os.environ.get("SEPDIST_NO_EXT"):
        return []
    omp = [] if sys.platform == "darwin" or os.environ.get("SEPDIST_NO_OPENMP") else ["-fopenmp"]
    ext = Extension(
        "sepdist._ckernels",
        ["src/sepdist/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3", *omp],
        extra_link_args=omp,
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=_extensions())
