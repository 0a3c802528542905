"""Build script for the optional compiled kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time); set MFSI_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("MFSI_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "mfsi._kernels_cy",
                    ["src/mfsi/_kernels_cy.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

# Metadata duplicated from pyproject.toml so that legacy setuptools
# (pre-PEP-660 editable installs) resolves the src layout correctly.
setup(
    name="mfsi",
    version="0.1.0",
    package_dir={"": "src"},
    packages=["mfsi"],
    entry_points={"console_scripts": ["mfsi = mfsi.cli:main"]},
    ext_modules=ext_modules,
)
