import argparse
import logging
import sys

from isacscheduler import version, config
from isacscheduler.cli import commands
from isacscheduler.exporters.grid_csv import MalformedGridError
from isacscheduler.mdp import sim
from isacscheduler.misc.settings_store import RunConfig, InvalidConfigError

_logger = logging.getLogger(__name__)


def main(argv=None):
    """
    @param argv: los argumentos, sin el nombre del programa. Por defecto, sys.argv[1:].

    @return: el código de salida del comando.
    """
    parser = _buildParser()
    args = parser.parse_args(argv)

    _configureLogging(args.verbose, args.quiet)

    try:
        runConfig = RunConfig.fromSources(args.config, _getOverrides(args))
        _logger.debug("Configuración resuelta: %s", runConfig.toJson())

        if args.command == "solve":
            return commands.cmdSolve(runConfig)
        elif args.command == "verify":
            return commands.cmdVerify(runConfig, args.fromDir)
        elif args.command == "simulate":
            return commands.cmdSimulate(runConfig, args.policy, args.probability)
        else:
            return commands.cmdSweep(runConfig, args.axis, _splitValues(args.values))
    except (InvalidConfigError, MalformedGridError) as e:
        _logger.error("%s", e)
        return commands.EXIT_INVALID_CONFIG


def run():
    sys.exit(main())


def _buildParser():
    # Opciones comunes a todos los subcomandos: el documento de configuración, la verbosidad y un flag por
    # cada opción de RunConfig, con su nombre punteado.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="documento JSON de configuración")

    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="loguear también los mensajes de depuración")
    verbosity.add_argument("--quiet", action="store_true", help="loguear solo advertencias y errores")

    overrides = common.add_argument_group("opciones de la corrida (reemplazan a las del documento de configuración)")
    for dottedName, option in RunConfig.getAllOptions():
        default = ",".join(str(v) for v in option.value) if isinstance(option.value, tuple) else option.value
        overrides.add_argument("--" + dottedName, dest=dottedName, metavar=option.name.upper(), default=None,
                               help="{0} Por defecto: {1}.".format(option.description, default))

    parser = argparse.ArgumentParser(prog=version.APP_NAME, description=version.DESCRIPTION,
                                     epilog="La variable de entorno {0} reemplaza a output.directory.".format(config.OUTPUT_DIR_ENV_VAR))
    parser.add_argument("--version", action="version", version="%(prog)s {0}".format(version.VERSION))
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    subparsers.add_parser("solve", parents=[common], help="resolver el modelo y exportar V*, pi* y la curva de umbrales")

    verify = subparsers.add_parser("verify", parents=[common], help="certificar las propiedades estructurales de la solución")
    verify.add_argument("--from-dir", dest="fromDir", metavar="DIR",
                        help="verificar los artefactos de un solve previo en lugar de resolver el modelo")

    simulate = subparsers.add_parser("simulate", parents=[common], help="estimar por Monte Carlo el costo de una política")
    simulate.add_argument("--policy", default=commands.OPTIMAL_POLICY, metavar="SOURCE",
                          help="'{0}', una de {1}, o el path de un CSV de política".format(commands.OPTIMAL_POLICY, ", ".join(sim.BASELINE_KINDS)))
    simulate.add_argument("--probability", type=float, default=0.5, help="probabilidad de comunicar de la política '{0}'".format(sim.RANDOM))

    sweep = subparsers.add_parser("sweep", parents=[common], help="resolver y certificar el modelo para varios valores de un parámetro")
    sweep.add_argument("--axis", required=True, help="el parámetro a variar: uno de {0}".format(", ".join(commands.SWEEP_AXES)))
    sweep.add_argument("--values", required=True, nargs="+", metavar="VALUE", help="los valores, separados por espacios o comas")

    return parser


def _getOverrides(args):
    arguments = vars(args)
    return {dottedName: arguments[dottedName] for dottedName, _ in RunConfig.getAllOptions() if arguments.get(dottedName) is not None}


def _splitValues(values):
    return [value for argument in values for value in argument.split(",") if value]


def _configureLogging(verbose, quiet):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger().setLevel(level)


if __name__ == "__main__":
    run()
