import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("LEIBAFF_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "leibaff._kernel._gridcore",
                    ["src/leibaff/_kernel/_gridcore.pyx"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # No Cython available: install the pure-Python package only.  The
        # kernel selector falls back to the interpreter automatically.
        ext_modules = []

setup(ext_modules=ext_modules)
