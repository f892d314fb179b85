"""Build hooks for the optional compiled scoring kernel.

The package is fully functional without the extension; if Cython or a C
compiler is unavailable the build falls back to the pure-numpy kernel and
only emits a warning.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that degrades to the pure-Python kernel on failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, broken toolchain, ...
            warnings.warn(f"compiled kernel skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernel {ext.name} skipped: {exc}")


ext_modules = []
cmdclass = {}
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "g1dbn._step1_native",
                ["src/g1dbn/_step1_native.pyx"],
                include_dirs=[numpy.get_include()],
                # -ffp-contract=off keeps results bit-reproducible across
                # compilers that would otherwise fuse multiply-adds.
                extra_compile_args=["-O2", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
    cmdclass["build_ext"] = OptionalBuildExt
except ImportError as exc:
    warnings.warn(f"compiled kernel not built (cython/numpy unavailable): {exc}")

setup(ext_modules=ext_modules, cmdclass=cmdclass)
