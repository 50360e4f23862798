"""Build script: compiles the optional joint-measurability kernel.

The extension is a performance accelerator only; roilab falls back to a
pure-Python implementation of the same algorithm when the build is
unavailable (no compiler, no Cython), so the build is allowed to fail.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that downgrades compiler failures to a warning."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure is non-fatal
            warnings.warn(f"skipping optional extension build: {exc}", stacklevel=1)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            warnings.warn(f"skipping optional extension {ext.name}: {exc}", stacklevel=1)


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython not available; building without the compiled kernel", stacklevel=1)
        return []
    return cythonize(
        [Extension("roilab._jm_kernel", ["src/roilab/_jm_kernel.pyx"])],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
