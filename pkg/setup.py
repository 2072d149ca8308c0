from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "poisint._speedups",
        ["src/poisint/_speedups.pyx"],
        extra_compile_args=["-O3"],
        optional=True,  # the package falls back to pure Python when the build fails
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"})
    if cythonize is not None
    else [],
)
