from setuptools import Extension, setup
from Cython.Build import cythonize

ext_modules = cythonize(
    [
        Extension(
            "sociogit.kernels._speedups",
            ["src/sociogit/kernels/_speedups.pyx"],
        )
    ],
    language_level=3,
)

setup(ext_modules=ext_modules)
