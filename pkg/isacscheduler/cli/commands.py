"""
Los flujos de trabajo de la línea de comandos. Cada comando recibe la configuración resuelta, escribe sus
artefactos en output.directory y retorna el código de salida.

Todos los artefactos llevan en su encabezado la configuración resuelta; el tiempo de ejecución solo se
loguea, de modo que repetir un comando con la misma configuración produce exactamente los mismos bytes.
"""

import json
import logging
import os

from isacscheduler import version
from isacscheduler.exporters import grid_csv
from isacscheduler.exporters.exporter_factory import ExporterFactory
from isacscheduler.mdp import solver, structure, sim
from isacscheduler.misc.settings_store import InvalidConfigError

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID_CONFIG = 2
EXIT_NON_CONVERGENCE = 3
EXIT_VERIFICATION_FAILED = 4

OPTIMAL_POLICY = "optimal"

SWEEP_AXES = ("lambdaS", "lambdaC", "costS", "costC", "gamma")

# Estados de las filas de un barrido de parámetros.
ROW_OK = "ok"
ROW_REJECTED = "rejected"
ROW_NON_CONVERGED = "nonConverged"
ROW_CHECKS_FAILED = "checksFailed"


def cmdSolve(runConfig):
    """
    Resuelve el modelo por iteración de valores y exporta V*, pi*, la curva tau y el reporte de la solución.
    Si no converge, exporta igualmente el resultado parcial, marcado con converged = false.
    """
    outputDir = _prepareOutputDir(runConfig)

    try:
        values, policy, report = solver.valueIteration(runConfig.model, runConfig.solver.tol, runConfig.solver.maxIter)
    except solver.NonConvergenceError as e:
        values, policy, report = e.values, e.policy, e.report
        _logger.error("%s Se exportan los resultados parciales.", e)

    thresholds, singleCrossingOk = solver.extractThresholds(policy)
    header = _buildHeader(runConfig, "solve", converged=report.converged)

    artifacts = []
    for outputFormat in runConfig.output.formats:
        exporter = ExporterFactory.getExporter(outputFormat, outputDir, header)
        artifacts += [exporter.exportValues(values, "value"),
                      exporter.exportPolicy(policy, "policy"),
                      exporter.exportThresholds(thresholds, "thresholds")]

    artifacts = [os.path.basename(path) for path in artifacts if path is not None]
    _writeDocument(outputDir, header, dict(report=report.toDict(),
                                           singleCrossingOk=singleCrossingOk,
                                           tau=thresholds.toList(),
                                           artifacts=artifacts), "report")

    _logger.info("Artefactos escritos en '%s': %s", outputDir, ", ".join(artifacts))
    return EXIT_OK if report.converged else EXIT_NON_CONVERGENCE


def cmdVerify(runConfig, fromDir=None):
    """
    Corre todos los chequeos estructurales y escribe el certificado en certificate.json.

    @param fromDir: un directorio con los artefactos de un solve previo (value.csv y, opcionalmente,
                    policy.csv). Si es None, el modelo se resuelve en el momento y además se verifica cada
                    iterado de la iteración de valores.

    @return: EXIT_OK si pasan todos los chequeos de structure.REQUIRED_CHECKS, EXIT_VERIFICATION_FAILED si
             falla alguno. Las violaciones de los chequeos informativos (submodularidad, iterados, crecimiento
             medio) quedan en certificate.json pero no cambian el código de salida.

    @raise MalformedGridError: si falta un artefacto o está mal formado.
    """
    params = runConfig.model
    tol = runConfig.solver.tol

    if fromDir is not None:
        values, policy = _readSolution(fromDir, params)
        extraReports = []
        source = os.path.abspath(fromDir)
    else:
        try:
            values, policy, report = solver.valueIteration(params, tol, runConfig.solver.maxIter)
        except solver.NonConvergenceError as e:
            _logger.error("%s No se puede verificar.", e)
            return EXIT_NON_CONVERGENCE
        extraReports = [structure.checkIterates(params, report.iterations, tol)]
        source = "solve"

    bundle = structure.certify(values, policy, params, tol)
    bundle = structure.CertificateBundle(bundle.reports + extraReports, bundle.assumptionSatisfied)

    for report in bundle.reports:
        if not report.passed:
            log = _logger.warning if report.checkName in structure.REQUIRED_CHECKS else _logger.info
            log("El chequeo '%s' falló: %d violaciones (la primera en %s).", report.checkName, len(report.violations),
                report.violations[0].coordinates)

    outputDir = _prepareOutputDir(runConfig)
    header = _buildHeader(runConfig, "verify", source=source)
    _writeDocument(outputDir, header, bundle.toDict(), "certificate")

    return EXIT_OK if bundle.requiredPassed else EXIT_VERIFICATION_FAILED


def cmdSimulate(runConfig, policySource=OPTIMAL_POLICY, probability=0.5):
    """
    Estima por Monte Carlo el costo descontado de una política desde sim.s0, y vuelca la primera trayectoria
    en trajectory.csv.

    @param policySource: OPTIMAL_POLICY, uno de sim.BASELINE_KINDS, o el path de un CSV de política.
    @param probability: la probabilidad de comunicar de la política sim.RANDOM.

    @raise MalformedGridError: si el archivo de política está mal formado.
    """
    params = runConfig.model
    simOptions = runConfig.sim
    optimalValue = None

    if policySource == OPTIMAL_POLICY:
        try:
            values, policy, _ = solver.valueIteration(params, runConfig.solver.tol, runConfig.solver.maxIter)
        except solver.NonConvergenceError as e:
            _logger.error("%s No se puede simular la política óptima.", e)
            return EXIT_NON_CONVERGENCE
        optimalValue = values[simOptions.s0]
    elif policySource in sim.BASELINE_KINDS:
        try:
            policy = sim.baselinePolicy(policySource, params, probability)
        except ValueError as e:
            raise InvalidConfigError("probability", str(e))
    else:
        policy, _ = grid_csv.readPolicyGrid(policySource)
        if policy.aMax != params.aMax:
            raise InvalidConfigError("model.aMax", "la política de '{0}' es de una grilla con aMax = {1}, no {2}".format(policySource, policy.aMax,
                                                                                                                     params.aMax))

    estimate = sim.estimateValue(policy, params, simOptions.s0, simOptions.n, simOptions.horizon, simOptions.seed)
    trajectory = sim.rollout(policy, params, simOptions.s0, simOptions.horizon, sim.trajectorySeed(simOptions.seed, 0))

    summary = dict(policySource=policySource, estimate=estimate.toDict(), firstTrajectoryCost=trajectory.discountedCost)
    if policySource == sim.RANDOM:
        summary["probability"] = probability

    if optimalValue is not None:
        error = abs(estimate.mean - optimalValue)
        allowed = 3 * estimate.stdError + estimate.truncationBiasBound
        summary.update(optimalValue=optimalValue, absoluteError=error, allowedError=allowed, withinAllowedError=error <= allowed)
        if error > allowed:
            _logger.warning("|media - V*(s0)| = %.6g supera 3 errores estándar más la cota de truncamiento (%.6g).", error, allowed)

    outputDir = _prepareOutputDir(runConfig)
    header = _buildHeader(runConfig, "simulate", policySource=policySource)
    _writeDocument(outputDir, header, summary, "summary")
    ExporterFactory.getExporter("csv", outputDir, header).exportTable(("k", "alpha_s", "alpha_b", "action", "outcome", "stage_cost"),
                                                                      trajectory.iterRows(params), "trajectory")

    _logger.info("Costo descontado estimado: %.6f ± %.6f (%d trayectorias).", estimate.mean, estimate.stdError, estimate.nTrajectories)
    return EXIT_OK


def cmdSweep(runConfig, axis, values):
    """
    Resuelve y certifica el modelo para cada valor de un parámetro, y escribe una fila por valor en
    sweep.csv y sweep.json. Los valores fuera de rango no detienen el barrido: su fila se marca como
    rechazada, con el diagnóstico.

    @param axis: uno de SWEEP_AXES, con o sin el prefijo "model.".
    @param values: los valores, como strings o números.

    @return: EXIT_INVALID_CONFIG si se rechazó algún valor; si no, EXIT_NON_CONVERGENCE si alguna fila no
             convergió; si no, EXIT_VERIFICATION_FAILED si alguna falló algún chequeo de
             structure.REQUIRED_CHECKS; si no, EXIT_OK. Las filas traen igualmente el resultado de todos los
             chequeos, incluidos los informativos.

    @raise InvalidConfigError: si el eje no es uno de SWEEP_AXES.
    """
    name = axis[len("model."):] if axis.startswith("model.") else axis
    if name not in SWEEP_AXES:
        raise InvalidConfigError("axis", "'{0}' no es un eje válido; se esperaba uno de {1}".format(axis, ", ".join(SWEEP_AXES)))

    rows = [_sweepRow(runConfig, name, value) for value in values]

    outputDir = _prepareOutputDir(runConfig)
    header = _buildHeader(runConfig, "sweep", axis="model." + name)
    columns = ("value", "status", "iterations", "finalSweepDelta", "assumptionSatisfied") + structure.CERTIFICATE_CHECKS + ("tau", "diagnostic")
    ExporterFactory.getExporter("csv", outputDir, header).exportTable(columns, [[row.get(column) for column in columns] for row in rows], "sweep")
    _writeDocument(outputDir, header, dict(rows=rows), "sweep")

    statuses = {row["status"] for row in rows}
    for status, exitCode in ((ROW_REJECTED, EXIT_INVALID_CONFIG),
                             (ROW_NON_CONVERGED, EXIT_NON_CONVERGENCE),
                             (ROW_CHECKS_FAILED, EXIT_VERIFICATION_FAILED)):
        if status in statuses:
            return exitCode
    return EXIT_OK


def _sweepRow(runConfig, name, value):
    try:
        rowConfig = runConfig.replace({"model." + name: value})
    except InvalidConfigError as e:
        _logger.warning("Valor rechazado: %s", e)
        return dict(value=value, status=ROW_REJECTED, diagnostic=str(e))

    params = rowConfig.model
    row = dict(value=getattr(params, name), assumptionSatisfied=params.satisfiesAssumption)

    try:
        values, policy, report = solver.valueIteration(params, rowConfig.solver.tol, rowConfig.solver.maxIter)
    except solver.NonConvergenceError as e:
        _logger.warning("%s = %r: %s", name, row["value"], e)
        row.update(status=ROW_NON_CONVERGED, iterations=e.report.iterations, finalSweepDelta=e.report.finalSweepDelta, diagnostic=str(e))
        return row

    bundle = structure.certify(values, policy, params, rowConfig.solver.tol)
    row.update(status=ROW_OK if bundle.requiredPassed else ROW_CHECKS_FAILED,
               iterations=report.iterations,
               finalSweepDelta=report.finalSweepDelta,
               tau=solver.extractThresholds(policy)[0].toList())
    row.update({report.checkName: report.passed for report in bundle.reports})

    _logger.info("%s = %r: %d barridos, chequeos %s.", name, row["value"], report.iterations, "aprobados" if bundle.requiredPassed else "fallidos")
    return row


def _readSolution(directory, params):
    valuePath = os.path.join(directory, "value.csv")
    policyPath = os.path.join(directory, "policy.csv")

    values, comments = grid_csv.readValueGrid(valuePath)
    if values.aMax != params.aMax:
        raise InvalidConfigError("model.aMax", "'{0}' es de una grilla con aMax = {1}, no {2}".format(valuePath, values.aMax, params.aMax))

    embedded = _embeddedConfig(comments)
    if embedded is not None and embedded.get("model") != params.toDict():
        _logger.warning("Los parámetros del modelo de '%s' difieren de los de la configuración actual; se usan los actuales.", valuePath)

    if os.path.exists(policyPath):
        policy, _ = grid_csv.readPolicyGrid(policyPath)
        if policy.aMax != values.aMax:
            raise InvalidConfigError("model.aMax", "'{0}' y '{1}' son de grillas distintas".format(valuePath, policyPath))
    else:
        _logger.info("No se encontró '%s': se usa la política greedy respecto de los valores leídos.", policyPath)
        policy = solver.extractPolicy(values, params)

    return values, policy


def _embeddedConfig(comments):
    for comment in comments:
        key, _, value = comment.partition(": ")
        if key == "config":
            try:
                return json.loads(value)
            except ValueError:
                return None
    return None


def _buildHeader(runConfig, command, **extra):
    header = dict(application="{0} {1}".format(version.APP_NAME, version.VERSION),
                  command=command,
                  config=runConfig.toDict())
    header.update(extra)
    return header


def _writeDocument(outputDir, header, document, name):
    return ExporterFactory.getExporter("json", outputDir, header).exportDocument(document, name)


def _prepareOutputDir(runConfig):
    directory = runConfig.output.directory
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as e:
        raise InvalidConfigError("output.directory", "no se pudo crear '{0}' ({1})".format(directory, e.strerror or e))
    return directory
