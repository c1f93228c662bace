"""Build script for the optional compiled DTW kernel.

The package is pure Python apart from mv2h._dtw_c; if Cython is missing the
install still succeeds and the library falls back to the pure kernel.
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
                "mv2h._dtw_c",
                ["src/mv2h/_dtw_c.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
