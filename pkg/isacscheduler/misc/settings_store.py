import json
import logging

from isacscheduler import config
from isacscheduler.mdp import solver, sim
from isacscheduler.mdp.model import ModelParams
from isacscheduler.misc import utils
from isacscheduler.misc.options import Options, Option, InvalidOptionError

_logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ("csv", "json", "ascii", "pgm", "svg")


class SolverOptions(Options):
    OPTIONS = [Option(name="tol",
                      value=solver.DEFAULT_TOLERANCE,
                      kind=float, minimum=0.0, minimumExclusive=True,
                      description="Tolerancia del cambio en norma infinito entre barridos."),
               Option(name="maxIter",
                      value=solver.DEFAULT_MAX_ITERATIONS,
                      kind=int, minimum=1,
                      description="Cantidad máxima de barridos de la iteración de valores.")]


class SimOptions(Options):
    OPTIONS = [Option(name="n",
                      value=sim.DEFAULT_TRAJECTORIES,
                      kind=int, minimum=2,
                      description="Cantidad de trayectorias de la estimación."),
               Option(name="horizon",
                      value=sim.DEFAULT_HORIZON,
                      kind=int, minimum=1,
                      description="Ranuras simuladas por trayectoria."),
               Option(name="seed",
                      value=sim.DEFAULT_SEED,
                      kind=int, minimum=0,
                      description="Semilla raíz de la simulación."),
               Option(name="s0",
                      value=(1, 1),
                      kind=utils.parseState,
                      description="Estado inicial (alphaS, alphaB).")]


class OutputOptions(Options):
    OPTIONS = [Option(name="directory",
                      value=config.DEFAULT_OUTPUT_DIR,
                      kind=str,
                      description="Directorio donde se escriben los artefactos."),
               Option(name="formats",
                      value=("csv", "json", "ascii"),
                      kind=utils.parseNames, choices=OUTPUT_FORMATS,
                      description="Formatos de las grillas exportadas.")]


class RunConfig:
    """
    La configuración resuelta de una corrida: un grupo de opciones por concern (model, solver, sim, output).
    Cada opción se identifica con un nombre punteado "grupo.opción" (ej.: "model.lambdaS"), que es el
    mismo nombre del flag de línea de comandos que la reemplaza.

    Fuentes, de menor a mayor precedencia: valores por defecto, documento JSON, variable de entorno
    (solo output.directory) y flags.
    """

    # Key = nombre del grupo.
    # Value = la clase Options del grupo.
    GROUPS = dict(model=ModelParams,
                  solver=SolverOptions,
                  sim=SimOptions,
                  output=OutputOptions)

    def __init__(self, model=None, solver=None, sim=None, output=None):
        """
        @raise InvalidConfigError: si el estado inicial está fuera de la grilla del modelo.
        """
        self.model = model or ModelParams()
        self.solver = solver or SolverOptions()
        self.sim = sim or SimOptions()
        self.output = output or OutputOptions()

        alphaS, alphaB = self.sim.s0
        if alphaS > self.model.aMax or alphaB > self.model.aMax:
            raise InvalidConfigError("sim.s0", "el estado {0} está fuera de la grilla {{0..{1}}}²".format(tuple(self.sim.s0), self.model.aMax))

    @classmethod
    def fromSources(cls, configPath=None, overrides=None, environ=None):
        """
        @param configPath: el path de un documento JSON de la forma {"model": {"gamma": 0.9, ...}, ...}, o None.
        @param overrides: un diccionario con los valores explícitos de los flags.
                          Key: el nombre punteado de la opción.
                          Value: el valor, como string o ya convertido.
        @param environ: las variables de entorno (por defecto, os.environ).

        @raise InvalidConfigError: si el documento no se puede leer, o si alguna opción es desconocida o inválida.
        """
        values = {}

        if configPath is not None:
            values = cls._readDocument(configPath)

        outputDir = config.getOutputDirOverride(environ)
        if outputDir is not None and "output.directory" not in (overrides or {}):
            values.setdefault("output", {})["directory"] = outputDir
            _logger.debug("output.directory tomado de %s: %s", config.OUTPUT_DIR_ENV_VAR, outputDir)

        for dottedName, value in (overrides or {}).items():
            group, name = cls._splitName(dottedName)
            values.setdefault(group, {})[name] = value

        return cls.fromDict(values)

    @classmethod
    def fromDict(cls, values):
        """
        @param values: un diccionario de grupos, cada uno un diccionario de opciones. Los grupos u opciones
                       ausentes toman su valor por defecto.

        @raise InvalidConfigError: si algún grupo u opción es desconocido, o algún valor es inválido.
        """
        unknownGroups = sorted(group for group in values if group not in cls.GROUPS)
        if unknownGroups:
            raise InvalidConfigError(unknownGroups[0], "grupo desconocido; se esperaba uno de {0}".format(", ".join(cls.GROUPS)))

        groups = {}
        for group, optionsClass in cls.GROUPS.items():
            groupValues = values.get(group, {})
            if not isinstance(groupValues, dict):
                raise InvalidConfigError(group, "se esperaba un objeto con opciones")
            try:
                groups[group] = optionsClass(**groupValues)
            except InvalidOptionError as e:
                raise InvalidConfigError("{0}.{1}".format(group, e.optionName), str(e).partition(": ")[2]) from e

        return cls(**groups)

    @classmethod
    def getAllOptions(cls):
        """
        Recorre todas las opciones de todos los grupos.

        @return: un generador de tuplas (nombre punteado, Option).
        """
        for group, optionsClass in cls.GROUPS.items():
            for option in optionsClass.OPTIONS:
                yield "{0}.{1}".format(group, option.name), option

    def getAllSettingsForGroup(self, group):
        """
        @return: un diccionario con todas las opciones del grupo.
                 Key: el nombre de la opción.
                 Value: su valor.
        """
        return getattr(self, group).toDict()

    def replace(self, overrides):
        """
        Retorna una nueva configuración con las opciones indicadas reemplazadas.

        @param overrides: un diccionario de nombres punteados y valores.
        """
        values = {group: self.getAllSettingsForGroup(group) for group in self.GROUPS}
        for dottedName, value in overrides.items():
            group, name = self._splitName(dottedName)
            values[group][name] = value
        return type(self).fromDict(values)

    def flatten(self):
        """
        @return: un diccionario con todas las opciones, con los nombres punteados como keys.
        """
        return {"{0}.{1}".format(group, name): value
                for group in self.GROUPS
                for name, value in self.getAllSettingsForGroup(group).items()}

    def toDict(self):
        """
        Retorna la configuración como un documento serializable a JSON, con el mismo formato que acepta
        fromDict, en el orden de declaración de las opciones.
        """
        return {group: {name: list(value) if isinstance(value, tuple) else value
                        for name, value in self.getAllSettingsForGroup(group).items()}
                for group in self.GROUPS}

    def toJson(self):
        """
        Serialización compacta, en una sola línea, usada en los encabezados de los artefactos.
        """
        return json.dumps(self.toDict(), separators=(",", ":"))

    @classmethod
    def _splitName(cls, dottedName):
        group, _, name = dottedName.partition(".")
        if group not in cls.GROUPS or not name:
            raise InvalidConfigError(dottedName, "nombre de opción desconocido")
        if cls.GROUPS[group].getOption(name) is None:
            raise InvalidConfigError(dottedName, "opción desconocida del grupo '{0}'".format(group))
        return group, name

    @staticmethod
    def _readDocument(configPath):
        try:
            with open(configPath, encoding="utf-8") as file:
                document = json.load(file)
        except OSError as e:
            raise InvalidConfigError(configPath, "no se pudo leer el archivo ({0})".format(e.strerror or e))
        except ValueError as e:
            raise InvalidConfigError(configPath, "el archivo no es un JSON válido ({0})".format(e))

        if not isinstance(document, dict):
            raise InvalidConfigError(configPath, "se esperaba un objeto JSON con los grupos de opciones")

        return document


class InvalidConfigError(Exception):
    def __init__(self, fieldName, message):
        super().__init__("{0}: {1}".format(fieldName, message))
        self.fieldName = fieldName
