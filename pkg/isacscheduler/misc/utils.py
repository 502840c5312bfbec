import re
import pprint

import numpy as np

from isacscheduler.mdp.model import AoIState

_stateSeparator = re.compile(r"[\s,;()\[\]]+")


def formatReal(value):
    """
    Formatea un real con 17 dígitos significativos, suficientes para recuperar exactamente el mismo
    float al volver a leerlo.
    """
    return "{0:.17g}".format(value)


def parseState(value):
    """
    Convierte un estado escrito como "1,1", "(1, 1)", o una secuencia de dos enteros, en un AoIState.

    @raise ValueError: si el valor no describe dos edades enteras no negativas.
    """
    if isinstance(value, str):
        parts = [p for p in _stateSeparator.split(value) if p]
    else:
        parts = list(value)

    if len(parts) != 2:
        raise ValueError("Se esperaban dos edades, no {0!r}.".format(value))

    ages = []
    for part in parts:
        try:
            if isinstance(part, bool) or (isinstance(part, float) and not part.is_integer()):
                raise ValueError(part)
            age = int(part)
        except (TypeError, ValueError):
            raise ValueError("La edad {0!r} no es un entero.".format(part))

        if age < 0:
            raise ValueError("La edad {0!r} es negativa.".format(part))
        ages.append(age)

    return AoIState(*ages)


def parseNames(value):
    """
    Convierte "csv,json" o una secuencia de strings en una tupla de nombres, sin repetidos y respetando
    el orden.
    """
    names = value.split(",") if isinstance(value, str) else [str(v) for v in value]
    result = []
    for name in (n.strip() for n in names):
        if name and name not in result:
            result.append(name)
    return tuple(result)


def assertGridsAreEqual(grid1, grid2, tol=0.0):
    """
    @param grid1: un ValueGrid, un PolicyGrid o un array.
    @param tol: la máxima diferencia admitida por celda.

    @raise AssertionError: si las grillas tienen formas distintas, o si alguna celda difiere en más de tol.
    """
    array1 = _gridArray(grid1)
    array2 = _gridArray(grid2)

    if array1.shape != array2.shape:
        raise AssertionError("Las grillas tienen formas distintas: {0} y {1}.".format(array1.shape, array2.shape))

    difference = np.abs(array1 - array2)
    differing = [(tuple(int(c) for c in index), float(array1[tuple(index)]), float(array2[tuple(index)]))
                 for index in np.argwhere(difference > tol)]

    if differing:
        raise AssertionError("Las grillas no son iguales ({0} celdas, tolerancia {1!r}):\n\n{2}".format(len(differing), tol,
                                                                                                       pprint.pformat(differing[:20])))


def _gridArray(grid):
    for attribute in ("values", "actions"):
        if hasattr(grid, attribute):
            return np.asarray(getattr(grid, attribute), dtype=float)
    return np.asarray(grid, dtype=float)
