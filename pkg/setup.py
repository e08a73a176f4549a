from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "explorebench.kernels._core",
                ["src/explorebench/kernels/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-Python fallback in explorebench.kernels covers the same API.
    pass

setup(ext_modules=ext_modules)
