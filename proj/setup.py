"""CMake-driven build for the fracheat extension module.

Follows the pybind11 cmake_example pattern: the extension is compiled by the
project's own CMakeLists.txt and the staged module is copied to wherever
setuptools expects it.
"""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str, sourcedir: str = "") -> None:
        super().__init__(name, sources=[])
        self.sourcedir = os.fspath(Path(sourcedir).resolve())


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        extdir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        cfg = "Debug" if int(os.environ.get("DEBUG", 0)) else "Release"
        build_temp = Path(self.build_temp) / ext.name
        build_temp.mkdir(parents=True, exist_ok=True)

        cmake_args = [
            f"-DCMAKE_BUILD_TYPE={cfg}",
            f"-DPython3_EXECUTABLE={sys.executable}",
            "-DFRACHEAT_BUILD_TESTS=OFF",
        ]
        subprocess.run(
            ["cmake", ext.sourcedir, *cmake_args], cwd=build_temp, check=True
        )
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_core",
             f"-j{os.cpu_count() or 2}"],
            cwd=build_temp,
            check=True,
        )

        staged = build_temp / "python" / "fracheat"
        extdir.mkdir(parents=True, exist_ok=True)
        for module in staged.glob("_core*"):
            self.copy_file(module, extdir / module.name)


setup(
    ext_modules=[CMakeExtension("fracheat._core")],
    cmdclass={"build_ext": CMakeBuild},
)
