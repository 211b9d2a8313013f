import os
import subprocess
import sys
from pathlib import Path

from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.extension import Extension


class CMakeExtension(Extension):
    def __init__(self, name: str):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    """Builds the _nevo extension through the project's CMake tree."""

    def build_extension(self, ext: CMakeExtension) -> None:
        source_dir = Path(__file__).resolve().parent
        ext_path = Path(self.get_ext_fullpath(ext.name)).resolve()
        package_dir = ext_path.parent  # .../nevo
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        cmake_args = [
            f"-DCMAKE_BUILD_TYPE={os.environ.get('NEVO_BUILD_TYPE', 'Release')}",
            "-DNEVO_BUILD_PYTHON=ON",
            "-DNEVO_BUILD_TESTS=OFF",
            f"-DPython3_EXECUTABLE={sys.executable}",
            f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={package_dir}",
        ]
        subprocess.run(["cmake", "-S", str(source_dir), "-B", str(build_dir), *cmake_args],
                       check=True)
        subprocess.run(["cmake", "--build", str(build_dir), "--target", "_nevo",
                        f"-j{os.cpu_count() or 2}"], check=True)


setup(
    packages=["nevo"],
    package_dir={"": "python"},
    ext_modules=[CMakeExtension("nevo._nevo")],
    cmdclass={"build_ext": CMakeBuild},
)
