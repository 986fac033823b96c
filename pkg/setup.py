"""Build hook for the optional compiled tree kernel.

Metadata lives in pyproject.toml.  When Cython or a C compiler is missing the
package still installs and runs on the pure-Python kernel.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("treesub._ctree", ["src/treesub/_ctree.pyx"])],
        compiler_directives={"language_level": "3"},
        quiet=True,
    )
except Exception:  # pragma: no cover - build fallback
    ext_modules = []

setup(ext_modules=ext_modules)
