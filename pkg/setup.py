"""Build script for the optional compiled kernels.

The package is pure Python except for penmetrics._fastkernels, a Cython
extension holding the O(N^2) counting loops used by the approximate-entropy
and recurrence indicators. If Cython or a C compiler is unavailable the build
completes without the extension and the package falls back to the NumPy
kernels at import time. Set PENMETRICS_NO_EXT=1 to skip the extension build
explicitly.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that downgrades compilation failures to a warning."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing entirely
            self._skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._skip(exc)

    @staticmethod
    def _skip(exc):
        print(f"warning: compiled kernels skipped ({exc}); "
              "falling back to pure NumPy kernels")


ext_modules = []
cmdclass = {}
if not os.environ.get("PENMETRICS_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "penmetrics._fastkernels",
                    ["src/penmetrics/_fastkernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
        cmdclass = {"build_ext": optional_build_ext}
    except ImportError as exc:
        print(f"warning: compiled kernels skipped ({exc}); "
              "falling back to pure NumPy kernels")

setup(ext_modules=ext_modules, cmdclass=cmdclass)
