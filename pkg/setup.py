"""Build script: compiles the optional chain-step extension.

If Cython or a C compiler is unavailable the package still installs; the
pure-Python kernel is used instead (see cliquemc.dynamics.KERNEL_BACKEND).
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "cliquemc._kernel",
                ["src/cliquemc/_kernel.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"cliquemc: building without compiled kernel ({exc})")

setup(ext_modules=ext_modules)
