"""
Lectura y escritura de grillas en CSV. Las filas son alphaS = 0..aMax y las columnas alphaB = 0..aMax, ambas
ascendentes, con una fila y una columna de encabezado con los índices. Antes de la tabla pueden ir
líneas de comentario que empiezan con "#"; se conservan tal cual al leer, de modo que exportar,
importar y volver a exportar produce exactamente los mismos bytes.
"""

import csv
import io

from isacscheduler.mdp.grids import ValueGrid, PolicyGrid
from isacscheduler.misc import utils

CORNER = "alphaS\\alphaB"
COMMENT_PREFIX = "#"


def formatGrid(array, formatCell, comments=()):
    """
    @param array: un array cuadrado.
    @param formatCell: una función que convierte cada celda en un string.
    @param comments: las líneas de comentario, sin el prefijo "#".

    @return: el CSV como string.
    """
    buffer = io.StringIO()

    for comment in comments:
        buffer.write("{0} {1}\n".format(COMMENT_PREFIX, comment) if comment else COMMENT_PREFIX + "\n")

    writer = csv.writer(buffer, lineterminator="\n")
    size = array.shape[0]
    writer.writerow([CORNER] + [str(alphaB) for alphaB in range(size)])
    for alphaS in range(size):
        writer.writerow([str(alphaS)] + [formatCell(cell) for cell in array[alphaS]])

    return buffer.getvalue()


def writeValueGrid(path, values, comments=()):
    _write(path, formatGrid(values.values, utils.formatReal, comments))


def writePolicyGrid(path, policy, comments=()):
    _write(path, formatGrid(policy.actions, lambda action: str(int(action)), comments))


def readValueGrid(path):
    """
    @return: una tupla (ValueGrid, líneas de comentario).

    @raise MalformedGridError: si el archivo no tiene el formato esperado.
    """
    comments, rows, lineNumber = _readTable(path, float)
    try:
        return ValueGrid(rows), comments
    except ValueError as e:
        raise MalformedGridError(path, lineNumber, str(e))


def readPolicyGrid(path):
    """
    @return: una tupla (PolicyGrid, líneas de comentario).

    @raise MalformedGridError: si el archivo no tiene el formato esperado, o alguna celda no es 0 ni 1.
    """
    comments, rows, lineNumber = _readTable(path, int)

    for index, row in enumerate(rows):
        for cell in row:
            if cell not in (0, 1):
                raise MalformedGridError(path, lineNumber - len(rows) + index + 1, "acción desconocida: {0} (se esperaba 0 o 1)".format(cell))

    return PolicyGrid(rows), comments


def _readTable(path, kind):
    """
    @return: una tupla (comentarios, filas convertidas, número de la última línea leída).
    """
    try:
        with open(path, encoding="utf-8", newline="") as file:
            lines = file.read().splitlines()
    except OSError as e:
        raise MalformedGridError(path, 0, "no se pudo leer el archivo ({0})".format(e.strerror or e))

    comments = []
    lineNumber = 0
    while lineNumber < len(lines) and lines[lineNumber].startswith(COMMENT_PREFIX):
        comments.append(lines[lineNumber][len(COMMENT_PREFIX):].lstrip(" "))
        lineNumber += 1

    tableLines = lines[lineNumber:]
    while tableLines and not tableLines[-1].strip():
        tableLines.pop()

    if not tableLines:
        raise MalformedGridError(path, lineNumber + 1, "falta la fila de encabezado")

    reader = csv.reader(tableLines)
    header = next(reader)
    lineNumber += 1
    size = len(header) - 1

    if header[0] != CORNER or header[1:] != [str(i) for i in range(size)]:
        raise MalformedGridError(path, lineNumber, "encabezado inválido; se esperaba '{0},0,1,...'".format(CORNER))

    rows = []
    for alphaS, row in enumerate(reader):
        lineNumber += 1

        if len(row) != size + 1:
            raise MalformedGridError(path, lineNumber, "se esperaban {0} columnas, no {1}".format(size + 1, len(row)))
        if row[0] != str(alphaS):
            raise MalformedGridError(path, lineNumber, "se esperaba la fila alphaS = {0}, no '{1}'".format(alphaS, row[0]))

        try:
            rows.append([kind(cell) for cell in row[1:]])
        except ValueError:
            raise MalformedGridError(path, lineNumber, "celda no numérica en la fila alphaS = {0}".format(alphaS))

    if len(rows) != size:
        raise MalformedGridError(path, lineNumber, "se esperaban {0} filas, no {1}".format(size, len(rows)))

    return comments, rows, lineNumber


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as file:
        file.write(text)


class MalformedGridError(Exception):
    def __init__(self, path, lineNumber, message):
        super().__init__("{0}, línea {1}: {2}".format(path, lineNumber, message))
        self.path = path
        self.lineNumber = lineNumber
