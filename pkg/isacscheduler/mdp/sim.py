"""
Simulación de Monte Carlo, con semilla, de políticas arbitrarias sobre la dinámica estocástica de las
edades. Estima el costo descontado con su error estándar y provee políticas de referencia.

Cada trayectoria usa dos streams independientes derivados de su semilla: uno para los resultados de los
enlaces y otro para las políticas aleatorias, de modo que una política aleatoria que nunca comunica
produce exactamente las mismas trayectorias que la que siempre sensa. Las semillas de las trayectorias
de una estimación se derivan de la semilla raíz con numpy.random.SeedSequence (la trayectoria i usa
spawn_key = (i,), ver trajectorySeed), por lo que ni n ni el orden de ejecución modifican una trayectoria individual.
"""

import logging

import numpy as np

from isacscheduler.mdp import model
from isacscheduler.mdp.grids import PolicyGrid
from isacscheduler.mdp.model import Action, Outcome, AoIState

_logger = logging.getLogger(__name__)

DEFAULT_HORIZON = 400
DEFAULT_TRAJECTORIES = 10000
DEFAULT_SEED = 42

ALWAYS_SENSE = "alwaysSense"
ALWAYS_COMM = "alwaysComm"
ALTERNATE = "alternate"
RANDOM = "random"
BASELINE_KINDS = (ALWAYS_SENSE, ALWAYS_COMM, ALTERNATE, RANDOM)


class Trajectory:
    def __init__(self, states, actions, outcomes, discountedCost):
        self.states = states
        self.actions = actions
        self.outcomes = outcomes
        self.discountedCost = discountedCost

    @property
    def horizon(self):
        return len(self.actions)

    def stageCosts(self, params):
        return [model.stageCost(state, action, params) for state, action in zip(self.states, self.actions)]

    def recomputeCost(self, params):
        """
        Recalcula la suma descontada a partir de las secuencias, con las mismas operaciones y en el mismo
        orden que la simulación.
        """
        cost = 0.0
        discount = 1.0
        for stage in self.stageCosts(params):
            cost = cost + discount * stage
            discount = discount * params.gamma
        return cost

    def iterRows(self, params):
        """
        Recorre las ranuras como tuplas (k, alphaS, alphaB, acción, resultado, costo de etapa).
        """
        for k, (state, action, outcome, stage) in enumerate(zip(self.states, self.actions, self.outcomes, self.stageCosts(params))):
            yield k, state.alphaS, state.alphaB, action.name.lower(), outcome.name.lower(), stage


class SimEstimate:
    def __init__(self, mean, stdError, nTrajectories, horizon, truncationBiasBound):
        self.mean = mean
        self.stdError = stdError
        self.nTrajectories = nTrajectories
        self.horizon = horizon
        self.truncationBiasBound = truncationBiasBound

    def toDict(self):
        return dict(mean=self.mean,
                    stdError=self.stdError,
                    nTrajectories=self.nTrajectories,
                    horizon=self.horizon,
                    truncationBiasBound=self.truncationBiasBound)


class AlternatePolicy:
    """
    Sensa en las ranuras pares y comunica en las impares, independientemente del estado.
    """

    def actionsFor(self, alphaS, alphaB, slot, uniforms):
        return np.full(np.shape(alphaS), Action.COMM if slot % 2 else Action.SENSE, dtype=np.int8)


class RandomBernoulliPolicy:
    """
    Comunica con probabilidad p en cada ranura, usando el stream de la política de cada trayectoria.
    """

    def __init__(self, probability):
        if not 0 <= probability <= 1:
            raise ValueError("La probabilidad debe estar en [0, 1], no {0!r}.".format(probability))
        self.probability = probability

    def actionsFor(self, alphaS, alphaB, slot, uniforms):
        return np.where(uniforms < self.probability, Action.COMM, Action.SENSE).astype(np.int8)


def baselinePolicy(kind, params, probability=0.5):
    """
    @param kind: uno de BASELINE_KINDS.
    @param probability: la probabilidad de comunicar, solo para RANDOM.

    @return: un PolicyGrid para las políticas estacionarias, o un objeto de política consultado en cada
             ranura para ALTERNATE y RANDOM.
    """
    if kind == ALWAYS_SENSE:
        return PolicyGrid.constant(params.aMax, Action.SENSE)
    elif kind == ALWAYS_COMM:
        return PolicyGrid.constant(params.aMax, Action.COMM)
    elif kind == ALTERNATE:
        return AlternatePolicy()
    elif kind == RANDOM:
        return RandomBernoulliPolicy(probability)

    raise ValueError("Política de referencia desconocida: '{0}'. Opciones: {1}.".format(kind, ", ".join(BASELINE_KINDS)))


def truncationBiasBound(params, horizon):
    if params.gamma == 0:
        return 0.0
    return params.gamma ** horizon * params.maxStageCost / (1 - params.gamma)


def rollout(policy, params, s0, horizon, seed):
    """
    Simula una trayectoria. Entradas idénticas producen trayectorias idénticas.

    @param policy: un PolicyGrid, o cualquier objeto con el método actionsFor(alphaS, alphaB, slot, uniforms).
    @param s0: el estado inicial.
    @param seed: un entero, o un numpy.random.SeedSequence.

    @return: un Trajectory.
    """
    if horizon < 1:
        raise ValueError("El horizonte debe ser al menos 1.")

    model.checkState(s0, params)
    outcomeUniforms, policyUniforms = _streams(_seedSequence(seed), 1, horizon)
    history = _simulate(policy, params, s0, outcomeUniforms, policyUniforms, keepHistory=True)
    states, actions, outcomes, costs = history

    return Trajectory([AoIState(int(s), int(b)) for s, b in states[:, 0, :]],
                      [Action(int(a)) for a in actions[:, 0]],
                      [Outcome(int(o)) for o in outcomes[:, 0]],
                      float(costs[0]))


def estimateValue(policy, params, s0, n, horizon, seed):
    """
    Media y error estándar del costo descontado sobre n trayectorias independientes. El resultado es
    determinístico dados (seed, n, horizon). La trayectoria i coincide con rollout(..., seed=trajectorySeed(seed, i)).

    @return: un SimEstimate.
    """
    if n < 2:
        raise ValueError("Se necesitan al menos 2 trayectorias.")
    if horizon < 1:
        raise ValueError("El horizonte debe ser al menos 1.")

    model.checkState(s0, params)

    children = [trajectorySeed(seed, i) for i in range(n)]
    streams = [_streams(child, 1, horizon) for child in children]
    outcomeUniforms = np.concatenate([s[0] for s in streams], axis=1)
    policyUniforms = np.concatenate([s[1] for s in streams], axis=1)

    costs = _simulate(policy, params, s0, outcomeUniforms, policyUniforms)

    if np.all(costs == costs[0]):
        mean, stdError = float(costs[0]), 0.0
    else:
        # np.sum usa suma por pares, lo que acota la deriva por redondeo.
        mean = float(np.sum(costs) / n)
        stdError = float(np.sqrt(np.sum((costs - mean) ** 2) / (n - 1) / n))

    _logger.debug("Estimación: media %.6f, error estándar %.6f (%d trayectorias, horizonte %d).", mean, stdError, n, horizon)
    return SimEstimate(mean, stdError, n, horizon, truncationBiasBound(params, horizon))


def trajectorySeed(seed, index):
    """
    Semilla de la trayectoria `index` de una estimación con semilla raíz `seed`. Equivale a
    SeedSequence(seed).spawn(n)[index], pero sin depender del estado de spawn de ningún objeto.
    """
    return _childSequence(_seedSequence(seed), index)


def _childSequence(seedSequence, index):
    return np.random.SeedSequence(seedSequence.entropy, spawn_key=tuple(seedSequence.spawn_key) + (index,),
                                  pool_size=seedSequence.pool_size)


def _seedSequence(seed):
    return seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)


def _streams(seedSequence, n, horizon):
    """
    @return: una tupla (uniformes de los enlaces, uniformes de la política), cada una de horizon x n.
    """
    outcomeSeed, policySeed = _childSequence(seedSequence, 0), _childSequence(seedSequence, 1)
    outcomeUniforms = np.random.default_rng(outcomeSeed).random((horizon, n))
    policyUniforms = np.random.default_rng(policySeed).random((horizon, n))
    return outcomeUniforms, policyUniforms


def _simulate(policy, params, s0, outcomeUniforms, policyUniforms, keepHistory=False):
    """
    Avanza todas las trayectorias en paralelo, una ranura por vez.

    @return: los costos descontados (un array de n), o, si keepHistory, una tupla (estados, acciones,
             resultados, costos) con los estados de (horizon + 1) x n x 2.
    """
    if isinstance(policy, PolicyGrid) and policy.aMax != params.aMax:
        raise ValueError("La política es de una grilla con aMax = {0}, no {1}.".format(policy.aMax, params.aMax))

    horizon, n = outcomeUniforms.shape
    alphaS = np.full(n, s0[0], dtype=np.int64)
    alphaB = np.full(n, s0[1], dtype=np.int64)
    costs = np.zeros(n)
    discount = 1.0

    probabilities = np.array([params.lambdaS, params.lambdaC])
    activationCosts = np.array([params.costS, params.costC])
    tables = {(action, outcome): model.transitionTable(action, outcome, params.aMax) for action in Action for outcome in Outcome}

    if keepHistory:
        states = np.empty((horizon + 1, n, 2), dtype=np.int64)
        actions = np.empty((horizon, n), dtype=np.int8)
        outcomes = np.empty((horizon, n), dtype=np.int8)
        states[0, :, 0], states[0, :, 1] = alphaS, alphaB

    for slot in range(horizon):
        slotActions = np.asarray(policy.actionsFor(alphaS, alphaB, slot, policyUniforms[slot]), dtype=np.int8)
        slotOutcomes = (outcomeUniforms[slot] < probabilities[slotActions]).astype(np.int8)

        costs = costs + discount * (alphaS + activationCosts[slotActions])
        discount = discount * params.gamma

        nextS = np.empty_like(alphaS)
        nextB = np.empty_like(alphaB)
        for (action, outcome), (tableS, tableB) in tables.items():
            selected = (slotActions == action) & (slotOutcomes == outcome)
            nextS[selected] = tableS[alphaS[selected], alphaB[selected]]
            nextB[selected] = tableB[alphaS[selected], alphaB[selected]]
        alphaS, alphaB = nextS, nextB

        if keepHistory:
            actions[slot], outcomes[slot] = slotActions, slotOutcomes
            states[slot + 1, :, 0], states[slot + 1, :, 1] = alphaS, alphaB

    if keepHistory:
        return states, actions, outcomes, costs
    return costs
