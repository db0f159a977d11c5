"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension; the kernel
selection in onestable._kernels falls back to a vectorized numpy
implementation when the compiled module is absent.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "onestable._kernels._ckern",
                ["src/onestable/_kernels/_ckern.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
