import os

# Directorio de salida por defecto, relativo al directorio de trabajo.
DEFAULT_OUTPUT_DIR = "isacscheduler-output"

# Única variable de entorno que se lee: reemplaza a output.directory si no se lo pasó como flag.
OUTPUT_DIR_ENV_VAR = "ISACSCHEDULER_OUTPUT_DIR"


def getOutputDirOverride(environ=None):
    """
    @return: el directorio indicado por la variable de entorno, o None si no está definida o está vacía.
    """
    environ = os.environ if environ is None else environ
    return environ.get(OUTPUT_DIR_ENV_VAR) or None
