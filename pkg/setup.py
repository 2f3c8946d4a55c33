from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "genproj._core",
        ["src/genproj/_core.pyx"],
        extra_compile_args=["-O3"],
        optional=True,  # package works without the compiled core (pure-Python fallback)
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
)
