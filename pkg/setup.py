"""Build script: compiles the optional Cython kernel for the flow stepper.

If no C compiler is available the build still succeeds; the package falls
back to the pure-numpy kernels at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "elastic_obstacle._kernels",
                ["src/elastic_obstacle/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - environments without Cython
    print(f"warning: Cython kernel not built ({exc}); using pure-Python fallback")

setup(ext_modules=ext_modules)
