"""Build script for the optional compiled simulation kernel.

The package is fully functional without the extension (a pure-Python
fallback with identical numerics is selected at import time); building
it just makes long runs ~100x faster.  Set PEASIM_SKIP_EXT=1 to install
without compiling.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("PEASIM_SKIP_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "peasim._speedup",
                    ["src/peasim/_speedup.pyx"],
                    # -ffp-contract=off keeps the compiled kernel bit-identical
                    # to the pure-Python fallback (no FMA contraction).
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
