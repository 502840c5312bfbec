import numpy as np

from isacscheduler.mdp.model import Action


class ValueGrid:
    """
    Función real densa sobre la grilla {0..aMax}², indexada por (alphaS, alphaB). Se usa para V, V* y
    las tablas Q.
    """

    def __init__(self, values):
        values = np.array(values, dtype=float)

        if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] < 3:
            raise ValueError("Se esperaba una grilla cuadrada de al menos 3 x 3, no {0}.".format(values.shape))

        if not np.all(np.isfinite(values)):
            raise ValueError("La grilla contiene valores no finitos.")

        self.values = values

    @classmethod
    def zeros(cls, aMax):
        return cls(np.zeros((aMax + 1, aMax + 1)))

    @classmethod
    def fromFunction(cls, aMax, function):
        """
        Crea una grilla evaluando function(alphaS, alphaB) en cada estado.
        """
        return cls([[function(i, j) for j in range(aMax + 1)] for i in range(aMax + 1)])

    @property
    def aMax(self):
        return self.values.shape[0] - 1

    def __getitem__(self, state):
        return float(self.values[tuple(state)])

    def __eq__(self, other):
        return isinstance(other, ValueGrid) and np.array_equal(self.values, other.values)

    def supDistance(self, other):
        return float(np.max(np.abs(self.values - other.values)))


class PolicyGrid:
    """
    Política estacionaria determinística: una acción por estado. Además de la grilla, implementa la
    interfaz de política que usa el simulador (actionsFor).
    """

    def __init__(self, actions):
        actions = np.array(actions, dtype=np.int8)

        if actions.ndim != 2 or actions.shape[0] != actions.shape[1]:
            raise ValueError("Se esperaba una grilla cuadrada, no {0}.".format(actions.shape))

        if not np.all((actions == Action.SENSE) | (actions == Action.COMM)):
            raise ValueError("La grilla contiene acciones desconocidas.")

        self.actions = actions

    @classmethod
    def constant(cls, aMax, action):
        return cls(np.full((aMax + 1, aMax + 1), int(action), dtype=np.int8))

    @property
    def aMax(self):
        return self.actions.shape[0] - 1

    def __getitem__(self, state):
        return Action(int(self.actions[tuple(state)]))

    def __eq__(self, other):
        return isinstance(other, PolicyGrid) and np.array_equal(self.actions, other.actions)

    def actionsFor(self, alphaS, alphaB, slot, uniforms):
        return self.actions[alphaS, alphaB]


class ThresholdCurve:
    """
    tau(alphaB) para cada fila alphaB en {0..aMax}: el mayor alphaS en el que se sensa.

    Convenciones: tau = -1 indica que en esa fila se comunica para todo alphaS, y tau = aMax que se
    sensa en toda la fila.
    """

    ALL_COMM = -1

    def __init__(self, tau, violations=None):
        """
        @param tau: una secuencia de enteros, uno por fila.
        @param violations: una lista con las filas (alphaB) en las que hubo una transición Comm -> Sense.
        """
        self.tau = np.array(tau, dtype=int)
        self.violations = list(violations or [])

    @property
    def aMax(self):
        return len(self.tau) - 1

    @property
    def singleCrossingOk(self):
        return not self.violations

    def __getitem__(self, alphaB):
        return int(self.tau[alphaB])

    def __len__(self):
        return len(self.tau)

    def toList(self):
        return [int(t) for t in self.tau]
