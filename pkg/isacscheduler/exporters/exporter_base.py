import json
import os

import isacscheduler.misc.options


class AbstractExporter(isacscheduler.misc.options.Options):
    """
    Escribe los artefactos de una corrida en un formato. Cada subclase implementa solo los artefactos que
    su formato puede representar; el resto de los métodos retorna None.

    Todos los artefactos llevan un encabezado que describe la corrida.
    """

    FORMAT = ""

    def __init__(self, outputDir, header, **options):
        """
        @param outputDir: el directorio donde se escriben los archivos.
        @param header: un diccionario que describe la corrida (aplicación, versión, configuración
                       resuelta, etc.), en el orden en que debe escribirse.
        """
        super().__init__(**options)

        self._outputDir = outputDir
        self._header = header

    def exportValues(self, values, name):
        """
        @return: el path del archivo escrito, o None si el formato no representa grillas de valores.
        """
        return None

    def exportPolicy(self, policy, name):
        return None

    def exportThresholds(self, thresholds, name):
        return None

    def exportDocument(self, document, name):
        return None

    def exportTable(self, columns, rows, name):
        return None

    def _getPath(self, name, extension):
        return os.path.join(self._outputDir, "{0}.{1}".format(name, extension))


def formatHeaderLines(header):
    """
    Convierte el encabezado en líneas "clave: valor", con los valores que no son strings serializados como
    JSON compacto, de modo que cada línea es autocontenida.
    """
    return ["{0}: {1}".format(key, value if isinstance(value, str) else json.dumps(value, separators=(",", ":")))
            for key, value in header.items()]
