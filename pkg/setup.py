import os

from setuptools import Extension, setup


def extensions():
    # GRAVER_OPT_PURE=1 skips the compiled kernels entirely; a missing
    # Cython or compiler just means the pure backend is used at runtime.
    if os.environ.get("GRAVER_OPT_PURE"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "graveropt._speedups",
        ["src/graveropt/_speedups.pyx"],
        language="c++",
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions())
