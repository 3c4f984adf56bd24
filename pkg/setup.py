from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext
from setuptools.errors import CCompilerError, ExecError, PlatformError


class OptionalBuildExt(build_ext):
    """Build the accelerator extensions if possible, fall back to pure Python."""

    def run(self):
        try:
            super().run()
        except (CCompilerError, ExecError, PlatformError) as exc:
            print(f"warning: compiled accelerators skipped ({exc}); "
                  "pure-Python backends will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except (CCompilerError, ExecError, PlatformError) as exc:
            print(f"warning: extension {ext.name} skipped ({exc})")


extensions = [
    Extension(
        "willvault.pairing._backend_cy",
        ["src/willvault/pairing/_backend_cy.pyx"],
        extra_compile_args=["-O3"],
    ),
    Extension(
        "willvault.sharding._gf256_cy",
        ["src/willvault/sharding/_gf256_cy.pyx"],
        extra_compile_args=["-O3"],
    ),
]

try:
    from Cython.Build import cythonize
    ext_modules = cythonize(extensions, language_level=3)
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
