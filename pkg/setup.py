import os

from setuptools import Extension, setup

# EVRANGE_NO_EXT=1 skips the compiled kernel; the package then runs on the
# numpy fallback selected at import time.
if os.environ.get("EVRANGE_NO_EXT") == "1":
    ext_modules = []
else:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "evrange._highpass",
                ["src/evrange/_highpass.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
