"""
Cálculo de V* y pi* por iteración de valores sobre la grilla truncada, extracción de la curva de
umbrales tau, y dos oráculos independientes: iteración de políticas con evaluación exacta, y
enumeración exhaustiva de políticas estacionarias en grillas diminutas.
"""

import itertools
import logging
import time

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from isacscheduler.mdp import model
from isacscheduler.mdp.grids import ValueGrid, PolicyGrid, ThresholdCurve
from isacscheduler.mdp.model import Action, Outcome

_logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9
DEFAULT_MAX_ITERATIONS = 100000

# Hasta esta cantidad de estados, la evaluación de políticas resuelve el sistema lineal directamente.
DIRECT_SOLVE_MAX_STATES = 2500

# Cota de la enumeración exhaustiva: a lo sumo 2^16 políticas.
ORACLE_MAX_STATES = 16


class SolveReport:
    def __init__(self, iterations, finalSweepDelta, gamma, wallTime, converged=True):
        self.iterations = iterations
        self.finalSweepDelta = finalSweepDelta
        self.suboptimalityBound = gamma * finalSweepDelta / (1 - gamma) if gamma > 0 else 0.0
        self.wallTime = wallTime
        self.converged = converged

    def toDict(self, includeWallTime=False):
        """
        @param includeWallTime: el tiempo de ejecución no es reproducible, por lo que por defecto no se
                                incluye (los artefactos deben ser idénticos entre corridas).
        """
        report = dict(iterations=self.iterations,
                      finalSweepDelta=self.finalSweepDelta,
                      suboptimalityBound=self.suboptimalityBound,
                      converged=self.converged)
        if includeWallTime:
            report["wallTime"] = self.wallTime
        return report


def qGrids(values, params):
    """
    @return: una tupla (Q_sense, Q_comm) de arrays sobre toda la grilla.
    """
    return model.qGrid(values, Action.SENSE, params), model.qGrid(values, Action.COMM, params)


def bellmanBackup(values, params):
    """
    TV(S) = min(Q_sense(S), Q_comm(S)) para cada estado. Es un barrido de tipo Jacobi: solo se lee la
    grilla anterior, que no se modifica.
    """
    qSense, qComm = qGrids(values, params)
    return ValueGrid(np.minimum(qSense, qComm))


def extractPolicy(values, params):
    """
    Política greedy: Sense si Delta <= 0 (los empates se resuelven a favor del sensado), Comm si no.
    """
    qSense, qComm = qGrids(values, params)
    return PolicyGrid(np.where(qSense - qComm <= 0, Action.SENSE, Action.COMM))


def extractThresholds(policy):
    """
    Recorre cada fila alphaB con alphaS ascendente. Si la fila es un bloque (posiblemente vacío) de Sense
    seguido de un bloque (posiblemente vacío) de Comm, tau es el último índice de Sense (-1 si no hay
    ninguno). Si hay una transición Comm -> Sense, la fila se registra como violación y tau es igualmente
    el último índice de Sense.

    @return: una tupla (ThresholdCurve, singleCrossingOk).
    """
    actions = policy.actions
    tau = []
    violations = []

    for alphaB in range(actions.shape[1]):
        row = actions[:, alphaB]
        senseIndexes = np.flatnonzero(row == Action.SENSE)
        tau.append(int(senseIndexes[-1]) if len(senseIndexes) else ThresholdCurve.ALL_COMM)

        if np.any((row[:-1] == Action.COMM) & (row[1:] == Action.SENSE)):
            violations.append(alphaB)

    curve = ThresholdCurve(tau, violations)
    return curve, curve.singleCrossingOk


def valueIteration(params, tol=DEFAULT_TOLERANCE, maxIter=DEFAULT_MAX_ITERATIONS, callback=None):
    """
    Itera V <- TV desde V = 0 hasta que el cambio en norma infinito sea <= tol, o hasta agotar maxIter.

    @param callback: una función opcional callback(iteration, values) que se llama luego de cada barrido.

    @return: una tupla (ValueGrid, PolicyGrid, SolveReport). Al salir por tolerancia se garantiza
             ||V - V*|| <= gamma tol / (1 - gamma).

    @raise NonConvergenceError: si se agotó maxIter sin alcanzar la tolerancia. La excepción lleva el
                                resultado parcial, para que el caller decida si lo acepta.
    """
    if tol <= 0:
        raise ValueError("La tolerancia debe ser positiva.")
    if maxIter < 1:
        raise ValueError("maxIter debe ser al menos 1.")

    start = time.perf_counter()
    values = ValueGrid.zeros(params.aMax)
    sweepDelta = float("inf")
    iteration = 0

    while iteration < maxIter:
        newValues = bellmanBackup(values, params)
        sweepDelta = newValues.supDistance(values)
        values = newValues
        iteration += 1

        if callback is not None:
            callback(iteration, values)

        if iteration % 1000 == 0:
            _logger.debug("Barrido %d: cambio %.3e", iteration, sweepDelta)

        if sweepDelta <= tol:
            break

    converged = sweepDelta <= tol
    report = SolveReport(iteration, sweepDelta, params.gamma, time.perf_counter() - start, converged)
    policy = extractPolicy(values, params)

    if not converged:
        _logger.warning("La iteración de valores no convergió en %d barridos (cambio %.3e > %.3e).", iteration, sweepDelta, tol)
        raise NonConvergenceError(values, policy, report)

    _logger.info("Iteración de valores: %d barridos, cambio final %.3e, %.3f s.", iteration, sweepDelta, report.wallTime)
    return values, policy, report


def evaluatePolicy(policy, params, evalTol=1e-12):
    """
    Evalúa exactamente una política estacionaria: resuelve V = g + gamma P V. Hasta
    DIRECT_SOLVE_MAX_STATES estados lo hace con un sistema lineal disperso; por encima, iterando hasta
    que el residuo en norma infinito sea <= evalTol.
    """
    costs, transitions = _policySystem(policy.actions, params)
    stateCount = len(costs)

    if stateCount <= DIRECT_SOLVE_MAX_STATES:
        system = (scipy.sparse.identity(stateCount, format="csr") - params.gamma * transitions).tocsc()
        values = scipy.sparse.linalg.spsolve(system, costs)
    else:
        values = np.zeros(stateCount)
        while True:
            newValues = costs + params.gamma * (transitions @ values)
            residual = np.max(np.abs(newValues - values))
            values = newValues
            if residual <= evalTol:
                break

    return ValueGrid(np.asarray(values).reshape(params.gridSize, params.gridSize))


def policyIteration(params, evalTol=1e-12, maxImprovements=1000):
    """
    Alterna evaluación exacta y mejora greedy (empates a favor de Sense) desde la política que siempre
    sensa, hasta que la política se estabiliza. Si la política cambia sin que los valores mejoren más
    allá de evalTol, los cambios se deben solo a empates numéricos y también se termina.

    @return: una tupla (ValueGrid, PolicyGrid).

    @raise PolicyIterationError: si no se estabiliza en maxImprovements mejoras.
    """
    policy = PolicyGrid.constant(params.aMax, Action.SENSE)
    values = evaluatePolicy(policy, params, evalTol)

    for improvement in range(1, maxImprovements + 1):
        newPolicy = extractPolicy(values, params)

        if newPolicy == policy:
            _logger.info("Iteración de políticas: estable luego de %d mejoras.", improvement - 1)
            return values, policy

        newValues = evaluatePolicy(newPolicy, params, evalTol)
        stalled = np.max(values.values - newValues.values) <= evalTol
        policy, values = newPolicy, newValues

        if stalled:
            _logger.debug("Iteración de políticas: la mejora %d no redujo los valores; se termina.", improvement)
            return values, extractPolicy(values, params)

    raise PolicyIterationError("La iteración de políticas no se estabilizó en {0} mejoras.".format(maxImprovements))


def exhaustivePolicyOracle(params):
    """
    Enumera todas las políticas estacionarias determinísticas, evalúa cada una exactamente (sistema lineal
    denso) y retorna el mínimo puntual de las funciones de valor junto con la política que lo alcanza.

    @return: una tupla (ValueGrid, PolicyGrid).

    @raise OracleSizeError: si la grilla tiene más de ORACLE_MAX_STATES estados.
    """
    stateCount = params.gridSize ** 2
    if stateCount > ORACLE_MAX_STATES:
        raise OracleSizeError("La enumeración exhaustiva admite a lo sumo {0} estados, no {1}.".format(ORACLE_MAX_STATES, stateCount))

    costs = np.stack([model.stageCostGrid(action, params).ravel() for action in Action])
    transitions = np.stack([_actionTransitionMatrix(action, params) for action in Action])
    identity = np.eye(stateCount)

    # El bit k de la política i indica la acción del estado k (0 = Sense, 1 = Comm). La política 0 es
    # la que siempre sensa.
    allPolicies = np.array(list(itertools.product((0, 1), repeat=stateCount)), dtype=np.int8)[:, ::-1]
    rows = np.arange(stateCount)

    allValues = []
    for chunk in np.array_split(allPolicies, max(1, len(allPolicies) // 4096)):
        chunkCosts = costs[chunk, rows]
        chunkTransitions = transitions[chunk, rows, :]
        systems = identity - params.gamma * chunkTransitions
        allValues.append(np.linalg.solve(systems, chunkCosts[..., np.newaxis])[..., 0])

    allValues = np.concatenate(allValues)
    best = int(np.argmin(allValues.sum(axis=1)))

    _logger.debug("Oráculo exhaustivo: %d políticas, óptima #%d.", len(allPolicies), best)

    shape = (params.gridSize, params.gridSize)
    return ValueGrid(allValues.min(axis=0).reshape(shape)), PolicyGrid(allPolicies[best].reshape(shape))


def _actionTransitionMatrix(action, params):
    """
    Matriz densa de transición cuando en todos los estados se juega la misma acción.
    """
    stateCount = params.gridSize ** 2
    matrix = np.zeros((stateCount, stateCount))
    rows = np.arange(stateCount)
    p = params.successProbability(action)

    for outcome, probability in ((Outcome.SUCCESS, p), (Outcome.FAIL, 1 - p)):
        nextS, nextB = model.transitionTable(action, outcome, params.aMax)
        np.add.at(matrix, (rows, (nextS * params.gridSize + nextB).ravel()), probability)

    return matrix


def _policySystem(actions, params):
    """
    @return: una tupla (costos, matriz de transición dispersa) del sistema de evaluación de una política,
             con los estados aplanados como alphaS * (aMax + 1) + alphaB.
    """
    size = params.gridSize
    flatActions = actions.ravel()
    rows = np.arange(size * size)
    costs = np.where(flatActions == Action.SENSE,
                     model.stageCostGrid(Action.SENSE, params).ravel(),
                     model.stageCostGrid(Action.COMM, params).ravel())

    allRows, allColumns, allProbabilities = [], [], []
    for action in Action:
        p = params.successProbability(action)
        selected = flatActions == action
        for outcome, probability in ((Outcome.SUCCESS, p), (Outcome.FAIL, 1 - p)):
            nextS, nextB = model.transitionTable(action, outcome, params.aMax)
            allRows.append(rows[selected])
            allColumns.append((nextS * size + nextB).ravel()[selected])
            allProbabilities.append(np.full(np.count_nonzero(selected), probability))

    # coo_matrix suma las entradas duplicadas (ambos resultados pueden llevar al mismo estado).
    transitions = scipy.sparse.coo_matrix((np.concatenate(allProbabilities), (np.concatenate(allRows), np.concatenate(allColumns))),
                                          shape=(size * size, size * size)).tocsr()
    return costs, transitions


class NonConvergenceError(Exception):
    def __init__(self, values, policy, report):
        super().__init__("La iteración de valores no convergió en {0} barridos (último cambio {1:.3e}).".format(report.iterations,
                                                                                                                report.finalSweepDelta))
        self.values = values
        self.policy = policy
        self.report = report


class PolicyIterationError(Exception):
    pass


class OracleSizeError(ValueError):
    pass
