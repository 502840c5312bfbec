"""
Primitivas del MDP de frescura de información con ISAC: parámetros, estados, acciones, resultados de
los enlaces, kernel de transición con saturación en aMax, costo de etapa, Q-valores y la función
diferencia Delta = Q_sense - Q_comm.

Todas las funciones son puras: no modifican sus argumentos ni mantienen estado compartido.
"""

import collections
import enum

import numpy as np

from isacscheduler.misc.options import Options, Option


class Action(enum.IntEnum):
    # u = 0 <=> sensar, u = 1 <=> comunicar.
    SENSE = 0
    COMM = 1


class Outcome(enum.IntEnum):
    FAIL = 0
    SUCCESS = 1


AoIState = collections.namedtuple("AoIState", "alphaS alphaB")


class ModelParams(Options):
    """
    Todas las constantes escalares del problema. Los valores por defecto son los del experimento
    numérico de referencia (aMax = 30, gamma = 0.95, lambdaS = 0.6, lambdaC = 0.9, costS = 0.2, costC = 0.1).

    La hipótesis lambdaC >= lambdaS no se exige al construir: se expone en satisfiesAssumption y los
    reportes de verificación deben informarla.
    """

    OPTIONS = [Option(name="lambdaS",
                      value=0.6,
                      kind=float, minimum=0.0, maximum=1.0,
                      description="Probabilidad de éxito del enlace de sensado."),
               Option(name="lambdaC",
                      value=0.9,
                      kind=float, minimum=0.0, maximum=1.0,
                      description="Probabilidad de éxito del enlace de comunicación."),
               Option(name="costS",
                      value=0.2,
                      kind=float, minimum=0.0,
                      description="Costo de activar el sensado."),
               Option(name="costC",
                      value=0.1,
                      kind=float, minimum=0.0,
                      description="Costo de activar la comunicación."),
               Option(name="gamma",
                      value=0.95,
                      kind=float, minimum=0.0, maximum=1.0, maximumExclusive=True,
                      description="Factor de descuento (gamma = 0 se admite para casos degenerados)."),
               Option(name="aMax",
                      value=30,
                      kind=int, minimum=2,
                      description="AoI máxima representable: cada coordenada satura en este valor.")]

    @property
    def satisfiesAssumption(self):
        """
        Indica si se cumple lambdaC >= lambdaS, hipótesis de la que dependen los resultados estructurales.
        """
        return self.lambdaC >= self.lambdaS

    @property
    def gridSize(self):
        return self.aMax + 1

    @property
    def maxStageCost(self):
        return self.aMax + max(self.costS, self.costC)

    @property
    def valueBound(self):
        """
        Cota superior de cualquier valor: la suma descontada del máximo costo de etapa.
        """
        return self.maxStageCost / (1 - self.gamma)

    def successProbability(self, action):
        return self.lambdaS if action == Action.SENSE else self.lambdaC

    def activationCost(self, action):
        return self.costS if action == Action.SENSE else self.costC


def iterStates(aMax):
    """
    Recorre todos los estados de la grilla {0..aMax}², por alphaS y luego por alphaB, ascendentemente.
    """
    for alphaS in range(aMax + 1):
        for alphaB in range(aMax + 1):
            yield AoIState(alphaS, alphaB)


def checkState(state, params):
    """
    @raise InvalidStateError: si el estado está fuera de la grilla.
    """
    alphaS, alphaB = state
    if not (0 <= alphaS <= params.aMax and 0 <= alphaB <= params.aMax):
        raise InvalidStateError("El estado {0} está fuera de la grilla {{0..{1}}}².".format(tuple(state), params.aMax))


def postActionState(state, action, outcome, params):
    """
    Retorna las edades inmediatamente después de la acción (instante k+), antes del incremento de la
    ranura: un sensado exitoso pone en 0 la edad en la estación base, y una comunicación exitosa
    alinea la edad de la fuente con la de la estación base.
    """
    checkState(state, params)
    alphaS, alphaB = state

    if outcome == Outcome.SUCCESS:
        if action == Action.SENSE:
            return AoIState(alphaS, 0)
        return AoIState(alphaB, alphaB)

    return AoIState(alphaS, alphaB)


def transition(state, action, outcome, params):
    """
    Retorna el estado siguiente según la tabla de evolución de las edades, saturando cada coordenada
    en aMax:

        (sense, éxito) -> (alphaS + 1, 1)
        (sense, falla) -> (alphaS + 1, alphaB + 1)
        (comm, éxito)  -> (alphaB + 1, alphaB + 1)
        (comm, falla)  -> (alphaS + 1, alphaB + 1)

    @raise InvalidStateError: si el estado está fuera de la grilla.
    """
    alphaS, alphaB = postActionState(state, action, outcome, params)
    return AoIState(min(alphaS + 1, params.aMax), min(alphaB + 1, params.aMax))


def successors(state, action, params):
    """
    Retorna la distribución de dos puntos de los estados siguientes.

    @return: una lista de tuplas (probabilidad, estado siguiente), primero el éxito y luego la falla.
    """
    p = params.successProbability(action)
    return [(p, transition(state, action, Outcome.SUCCESS, params)),
            (1 - p, transition(state, action, Outcome.FAIL, params))]


def stageCost(state, action, params):
    checkState(state, params)
    return state[0] + params.activationCost(action)


def qValue(values, state, action, params):
    """
    Q_u(S) = g(S, u) + gamma * E[V(S') | S, u], con la esperanza calculada exactamente sobre los dos
    resultados posibles del enlace.

    @param values: un ValueGrid, o un array de (aMax + 1) x (aMax + 1).
    """
    (p, nextSuccess), (_, nextFail) = successors(state, action, params)
    grid = asArray(values)
    return stageCost(state, action, params) + params.gamma * (p * grid[nextSuccess] + (1 - p) * grid[nextFail])


def delta(values, state, params):
    """
    Delta(S) = Q_sense(S) - Q_comm(S). Su signo determina la acción óptima; en los bordes saturados se
    define por la diferencia de Q-valores.
    """
    return qValue(values, state, Action.SENSE, params) - qValue(values, state, Action.COMM, params)


def deltaClosedForm(values, state, params):
    """
    Forma cerrada de Delta, válida solo en el interior sin saturación (alphaS, alphaB <= aMax - 1):

        (cs - cc) + gamma lambdaS V(alphaS+1, 1) - gamma lambdaC V(alphaB+1, alphaB+1)
                  + gamma (lambdaC - lambdaS) V(alphaS+1, alphaB+1)
    """
    alphaS, alphaB = state
    if not (0 <= alphaS < params.aMax and 0 <= alphaB < params.aMax):
        raise InvalidStateError("La forma cerrada solo vale en el interior: {0}.".format(tuple(state)))

    grid = asArray(values)
    gamma = params.gamma
    return ((params.costS - params.costC)
            + gamma * params.lambdaS * grid[alphaS + 1, 1]
            - gamma * params.lambdaC * grid[alphaB + 1, alphaB + 1]
            + gamma * (params.lambdaC - params.lambdaS) * grid[alphaS + 1, alphaB + 1])


def meet(state1, state2):
    return AoIState(min(state1[0], state2[0]), min(state1[1], state2[1]))


def join(state1, state2):
    return AoIState(max(state1[0], state2[0]), max(state1[1], state2[1]))


### ###################################################################### ###
### Versiones vectorizadas sobre toda la grilla, usadas por solver y sim.  ###
### ###################################################################### ###

def transitionTable(action, outcome, aMax):
    """
    Retorna los índices de los estados siguientes para todos los estados de la grilla.

    @return: una tupla de dos arrays de enteros (nextS, nextB), de (aMax + 1) x (aMax + 1), tal que el
             sucesor de (i, j) es (nextS[i, j], nextB[i, j]).
    """
    alphaS, alphaB = np.indices((aMax + 1, aMax + 1))

    if outcome == Outcome.SUCCESS and action == Action.SENSE:
        nextS, nextB = alphaS + 1, np.ones_like(alphaB)
    elif outcome == Outcome.SUCCESS:
        nextS, nextB = alphaB + 1, alphaB + 1
    else:
        nextS, nextB = alphaS + 1, alphaB + 1

    return np.minimum(nextS, aMax), np.minimum(nextB, aMax)


def stageCostGrid(action, params):
    alphaS = np.indices((params.gridSize, params.gridSize))[0]
    return alphaS + params.activationCost(action)


def qGrid(values, action, params):
    """
    Q_u sobre toda la grilla. Cada elemento se calcula con las mismas operaciones, en el mismo orden,
    que qValue, por lo que ambos coinciden bit a bit.
    """
    grid = asArray(values)
    p = params.successProbability(action)
    successIndex = transitionTable(action, Outcome.SUCCESS, params.aMax)
    failIndex = transitionTable(action, Outcome.FAIL, params.aMax)
    return stageCostGrid(action, params) + params.gamma * (p * grid[successIndex] + (1 - p) * grid[failIndex])


def deltaGrid(values, params):
    return qGrid(values, Action.SENSE, params) - qGrid(values, Action.COMM, params)


def asArray(values):
    return values.values if hasattr(values, "values") else np.asarray(values, dtype=float)


class InvalidStateError(ValueError):
    pass
