"""Build script: compiles the optional fast kernels.

The package works without the compiled extension (a numpy fallback is
selected at import time), so any compiler failure downgrades to a warning
instead of aborting the install.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the Cython kernels if possible; skip them otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"warning: could not build the compiled kernels ({exc}); "
            "falling back to the pure-Python backend",
            file=sys.stderr,
        )


def _extensions():
    import os

    if not os.path.exists("src/socialnav/_kernels.pyx"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError as exc:
        print(f"warning: {exc}; skipping compiled kernels", file=sys.stderr)
        return []
    ext = Extension(
        "socialnav._kernels",
        ["src/socialnav/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        # no -ffast-math: run-to-run determinism is part of the contract
        # (-fno-builtin-pow keeps pow(x, 2.0) a real libm call, matching how
        # the interpreter squares via **)
        extra_compile_args=["-O3", "-fno-builtin-pow"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(
    ext_modules=_extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
