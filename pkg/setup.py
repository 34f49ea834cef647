"""Build the optional Cython counting kernel.

The package works without it: ``seqassoc.kernels`` falls back to the
pure-Python implementation when the extension is not importable.
"""
import os

import numpy as np
from setuptools import setup

ext_modules = []
if os.environ.get("SEQASSOC_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "seqassoc._kernels",
                    ["src/seqassoc/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    language="c++",
                    extra_compile_args=["-O3", "-std=c++17"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
