import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and os.environ.get("LANGEVIN_MIMO_PURE_PYTHON") != "1":
    ext = Extension(
        "langevin_mimo._kernels",
        ["src/langevin_mimo/_kernels.pyx"],
        extra_compile_args=["-O3"],
        optional=True,  # pure-Python backend takes over if the build fails
    )
    ext_modules = cythonize([ext], language_level="3")

setup(ext_modules=ext_modules)
