"""Build the optional Cython kernels; the package falls back to numpy when absent."""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("BELLOPT_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "bellopt._ckernels",
                    ["src/bellopt/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
