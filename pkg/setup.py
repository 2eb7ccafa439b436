import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; hsball falls back to NumPy kernels
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "hsball._core",
                ["src/hsball/_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
