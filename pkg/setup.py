"""Build script.

The compiled kernel module is an optional accelerator: if Cython or a C
compiler is unavailable the build falls back to the pure-Python kernels
and the package still works, just slower.  Set SARGSC_PURE_PYTHON=1 to
skip the extension on purpose.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Try to build the accelerator, warn instead of failing."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, broken toolchain
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print("*" * 72)
        print("WARNING: compiled kernels not built, using pure-Python fallback")
        print(f"         reason: {exc}")
        print("*" * 72)


ext_modules = []
cmdclass = {}
if os.environ.get("SARGSC_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "sargsc._kernels._ckernels",
                    ["src/sargsc/_kernels/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
        cmdclass["build_ext"] = optional_build_ext
    except ImportError:
        pass

setup(ext_modules=ext_modules, cmdclass=cmdclass)
