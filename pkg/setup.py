"""Build hook for the optional compiled search kernel.

The package works without it: ``qtomo._kernel`` falls back to the
pure-Python search when the extension is missing.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("QTOMO_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:  # pragma: no cover
        pass
    else:
        ext_modules = cythonize(
            [Extension("qtomo._csearch", ["src/qtomo/_csearch.pyx"],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
