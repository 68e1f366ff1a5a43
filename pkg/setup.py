from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "parabound._kernel_c",
        ["src/parabound/_kernel.pyx"],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
