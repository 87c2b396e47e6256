import os

from setuptools import Extension, setup

# The compiled kernel is optional: the package falls back to the pure-Python
# twin at import time.  Set CRITTUPLE_NO_EXT=1 to skip building it.
ext_modules = []
if os.environ.get("CRITTUPLE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("crittuple._kernel", ["src/crittuple/_kernel.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
