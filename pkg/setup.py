# Instalación:
#   pip install .
# Luego el comando "isacscheduler" queda disponible; por ejemplo:
#   isacscheduler solve --model.aMax 30 --output.directory resultados

from setuptools import setup, find_packages

from isacscheduler import version

setup(name=version.APP_NAME,
      version=version.VERSION,
      description=version.DESCRIPTION,
      packages=find_packages(exclude=["isacscheduler.test"]),
      python_requires=">=3.8",
      install_requires=["numpy>=1.17",
                        "scipy>=1.4",
                        "Pillow>=6.0",
                        "lxml>=4.0"],
      entry_points={"console_scripts": ["isacscheduler = isacscheduler.cli.main:run"]},
      test_suite="isacscheduler.test")
