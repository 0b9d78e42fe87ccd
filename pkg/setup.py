"""Build script for the optional compiled kernel core.

The package is fully functional without the extension: covsys.kernels falls
back to the vectorized numpy implementation at import time.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:  # pure-python install
    extensions = []
else:
    extensions = cythonize(
        [
            Extension(
                "covsys.kernels._ckernels",
                ["src/covsys/kernels/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions)
