"""Build hook for the optional Cython kernel.

The package works without the extension (numpy fallback is selected at
import); the extension is built when Cython is available and skipped
otherwise instead of failing the install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "toolgate.kernels._speedups",
                ["src/toolgate/kernels/_speedups.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
