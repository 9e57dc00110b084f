from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fdsiam._kernels._core",
                ["src/fdsiam/_kernels/_core.pyx"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython available: the package falls back to the pure-Python kernels.
    ext_modules = []

setup(ext_modules=ext_modules)
