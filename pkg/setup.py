import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernels are optional: the package falls back to numpy
# implementations when the extension is absent or MULTCORR_PURE=1.
ext_modules = []
if cythonize is not None and not os.environ.get("MULTCORR_SKIP_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "multcorr._kernels._ckernels",
                ["src/multcorr/_kernels/_ckernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
