"""Build script: compiles the optional geometry kernel extension.

The package runs fine without the extension (a pure-Python twin is selected
at import time), so any failure here downgrades to a source-only install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "taskforge.physical._kernels_cy",
                ["src/taskforge/physical/_kernels_cy.pyx"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
