import sys

from setuptools import Extension, setup

# The compiled scan kernel is an optimization: if Cython or a C compiler is
# unavailable the package falls back to the pure numpy backend at import time.
ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("hmquintic._core", ["src/hmquintic/_core.pyx"])],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover
    print(f"hmquintic: building without compiled core ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
