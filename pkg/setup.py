"""Build script: compiles the optional Frank-Wolfe kernel extension.

The package is fully functional without the extension (a pure-numpy
fallback is selected at import time), so any failure to cythonize or
compile downgrades to a warning instead of failing the install.
"""

import warnings

from setuptools import setup


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError as exc:
        warnings.warn(f"skipping compiled kernel build ({exc}); "
                      "pure-Python fallback will be used")
        return []
    ext = Extension(
        "projfree._fwkernel",
        ["src/projfree/_fwkernel.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=_extensions())
