"""Build script: compiles the optional interval-arithmetic kernel.

The package works without the extension (a pure-Python fallback is selected
at import time), so compilation failures are downgraded to warnings.
Set MQE_PURE_PYTHON=1 to skip the extension entirely.
"""

import os
import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, broken toolchain, ...
            warnings.warn(f"skipping compiled kernels ({exc}); using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"could not build {ext.name} ({exc}); using pure-Python fallback")


ext_modules = []
if os.environ.get("MQE_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "mqe._kernels_c",
                    sources=["src/mqe/_kernels_c.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        warnings.warn("Cython not available; using pure-Python kernels")

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
