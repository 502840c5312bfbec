import unittest

import numpy as np

from isacscheduler.mdp import solver, structure
from isacscheduler.mdp.grids import ValueGrid, PolicyGrid
from isacscheduler.mdp.model import Action, ModelParams


class ReferenceSolutionTest(unittest.TestCase):
    """
    Chequeos sobre la solución con los parámetros de referencia (aMax = 30, gamma = 0.95).
    """

    @classmethod
    def setUpClass(cls):
        cls._params = ModelParams()
        cls._values, cls._policy, _ = solver.valueIteration(cls._params, tol=1e-9)

    def test_value_function_is_monotone(self):
        self.assertTrue(structure.checkMonotone(self._values, 1e-9).passed)

    def test_value_function_is_not_submodular_in_the_low_age_corner(self):
        report = structure.checkSubmodular(self._values, 1e-9)

        self.assertFalse(report.passed)
        self.assertEqual(len(report.violations), 110)
        self.assertEqual(report.violations[0].coordinates, (0, 0))
        self.assertAlmostEqual(report.violations[0].magnitude, 1.8007, places=3)

    def test_delta_passes_on_the_interior(self):
        self.assertTrue(structure.checkDeltaMonotone(self._values, self._params, 1e-9).passed)

    def test_q_functions_inherit_the_submodularity_violations(self):
        self.assertFalse(structure.checkQSubmodular(self._values, self._params, 1e-9).passed)
        self.assertFalse(structure.checkBellmanSubmodular(self._values, self._params, 1e-9).passed)

    def test_threshold_curve_is_nondecreasing(self):
        thresholds, singleCrossingOk = solver.extractThresholds(self._policy)

        self.assertTrue(singleCrossingOk)
        self.assertEqual(len(thresholds), 31)
        self.assertTrue(structure.checkThresholdMonotone(thresholds).passed)

    def test_sense_region_is_a_down_set(self):
        self.assertTrue(structure.checkSingleCrossing(self._policy).passed)
        self.assertTrue(structure.checkSenseDownSet(self._policy).passed)

    def test_source_age_dominates_growth(self):
        self.assertTrue(structure.checkSourceDominantGrowth(self._values).passed)

    def test_certificate_passes_every_required_check(self):
        bundle = structure.certify(self._values, self._policy, self._params, 1e-9)
        document = bundle.toDict()

        self.assertTrue(bundle.requiredPassed)
        self.assertFalse(bundle.allPassed)
        self.assertEqual(tuple(report.checkName for report in bundle.reports), structure.CERTIFICATE_CHECKS)
        for name in structure.REQUIRED_CHECKS:
            self.assertTrue(bundle.getReport(name).passed, name)
        self.assertIn("informativeNotice", document)
        self.assertNotIn("assumptionNotice", document)
        self.assertEqual([check["checkName"] for check in document["checks"] if check["required"]], list(structure.REQUIRED_CHECKS))

    def test_checks_do_not_modify_their_inputs(self):
        values = ValueGrid(self._values.values)
        policy = PolicyGrid(self._policy.actions)

        first = structure.certify(self._values, self._policy, self._params).toDict()
        second = structure.certify(self._values, self._policy, self._params).toDict()

        self.assertEqual(first, second)
        self.assertEqual(values, self._values)
        self.assertEqual(policy, self._policy)


class ExactSolutionStructureTest(unittest.TestCase):
    """
    La V* exacta del oráculo exhaustivo (aMax = 3, gamma = 0.9) es monótona pero no submodular: la falta de
    submodularidad es del modelo, no un error de redondeo de la iteración de valores.
    """

    @classmethod
    def setUpClass(cls):
        cls._values, cls._policy = solver.exhaustivePolicyOracle(ModelParams(aMax=3, gamma=0.9))

    def test_exact_values_are_monotone(self):
        self.assertTrue(structure.checkMonotone(self._values).passed)

    def test_exact_values_violate_submodularity(self):
        report = structure.checkSubmodular(self._values)
        magnitudes = {v.coordinates: v.magnitude for v in report.violations}

        self.assertFalse(report.passed)
        for coordinates, magnitude in (((0, 0), 1.2731), ((1, 0), 0.2191), ((1, 1), 0.5909)):
            self.assertIn(coordinates, magnitudes)
            self.assertAlmostEqual(magnitudes[coordinates], magnitude, places=3)


class MonotoneTest(unittest.TestCase):
    def test_additive_function_passes(self):
        self.assertTrue(structure.checkMonotone(ValueGrid.fromFunction(5, lambda i, j: i + j)).passed)

    def test_decreasing_function_lists_every_violation(self):
        aMax = 5
        report = structure.checkMonotone(ValueGrid.fromFunction(aMax, lambda i, j: -i))

        self.assertFalse(report.passed)
        self.assertEqual(len(report.violations), aMax * (aMax + 1))
        self.assertTrue(all(v.axis == "alphaS" for v in report.violations))
        self.assertEqual(report.violations, sorted(report.violations, key=lambda v: (v.coordinates, v.axis)))

    def test_lowered_cell_is_reported(self):
        values = ValueGrid.fromFunction(5, lambda i, j: i + j).values
        values[3, 3] = 0

        report = structure.checkMonotone(ValueGrid(values))

        coordinates = [(v.coordinates, v.axis) for v in report.violations]
        self.assertEqual(coordinates, [((3, 3), "alphaB"), ((3, 3), "alphaS")])


class SubmodularTest(unittest.TestCase):
    def test_modular_function_passes(self):
        self.assertTrue(structure.checkSubmodular(ValueGrid.fromFunction(5, lambda i, j: i + j)).passed)

    def test_supermodular_function_fails_on_every_block(self):
        aMax = 5
        report = structure.checkSubmodular(ValueGrid.fromFunction(aMax, lambda i, j: i * j))

        self.assertEqual(len(report.violations), aMax * aMax)
        self.assertTrue(all(v.magnitude == 1.0 for v in report.violations))


class DeltaMonotoneTest(unittest.TestCase):
    def test_zero_values_pass(self):
        params = ModelParams(aMax=5)

        report = structure.checkDeltaMonotone(ValueGrid.zeros(5), params)

        self.assertTrue(report.passed)
        self.assertEqual(report.region, structure.INTERIOR)

    def test_violated_assumption_is_reported(self):
        params = ModelParams(aMax=5, lambdaS=0.9, lambdaC=0.6)

        report = structure.checkDeltaMonotone(ValueGrid.fromFunction(5, lambda i, j: i + j), params)

        self.assertFalse(report.assumptionSatisfied)
        self.assertIn("assumptionSatisfied", report.toDict())
        self.assertTrue(report.notes)


class QSubmodularTest(unittest.TestCase):
    def test_zero_values_pass(self):
        self.assertTrue(structure.checkQSubmodular(ValueGrid.zeros(5), ModelParams(aMax=5)).passed)

    def test_supermodular_values_make_a_q_function_fail(self):
        report = structure.checkQSubmodular(ValueGrid.fromFunction(5, lambda i, j: i * j), ModelParams(aMax=5))

        self.assertFalse(report.passed)
        self.assertTrue({v.axis for v in report.violations} <= {"qSense", "qComm"})


class ThresholdMonotoneTest(unittest.TestCase):
    def test_constant_curve_passes(self):
        self.assertTrue(structure.checkThresholdMonotone([3, 3, 3, 3]).passed)

    def test_decreasing_step_fails(self):
        report = structure.checkThresholdMonotone([0, 2, 1])

        self.assertFalse(report.passed)
        self.assertEqual([v.coordinates for v in report.violations], [(1, 2)])


class PolicyShapeTest(unittest.TestCase):
    def test_single_crossing_violation_counts_switches(self):
        actions = np.zeros((5, 5), dtype=np.int8)
        actions[:, 3] = [0, 1, 0, 1, 0]

        report = structure.checkSingleCrossing(PolicyGrid(actions))

        self.assertEqual([(v.coordinates, v.magnitude) for v in report.violations], [((3,), 2.0)])

    def test_threshold_policy_is_a_sense_down_set(self):
        # Se sensa si alphaS <= alphaB: tau(alphaB) = alphaB, no decreciente.
        actions = np.fromfunction(lambda i, j: i > j, (6, 6)).astype(np.int8)

        self.assertTrue(structure.checkSenseDownSet(PolicyGrid(actions)).passed)
        self.assertTrue(structure.checkSingleCrossing(PolicyGrid(actions)).passed)

    def test_shrinking_sense_region_fails(self):
        # Se sensa si alphaS <= aMax - alphaB: la región se achica al crecer alphaB.
        actions = np.fromfunction(lambda i, j: i > 5 - j, (6, 6)).astype(np.int8)

        report = structure.checkSenseDownSet(PolicyGrid(actions))

        self.assertFalse(report.passed)
        self.assertTrue(all(v.axis == "alphaB" for v in report.violations))


class BellmanSubmodularTest(unittest.TestCase):
    def test_zero_values_pass(self):
        self.assertTrue(structure.checkBellmanSubmodular(ValueGrid.zeros(5), ModelParams(aMax=5)).passed)

    def test_steeply_decreasing_values_fail(self):
        report = structure.checkBellmanSubmodular(ValueGrid.fromFunction(5, lambda i, j: -100 * i), ModelParams(aMax=5))

        self.assertFalse(report.passed)
        self.assertIn("alphaS", {v.axis for v in report.violations})


class SourceDominantGrowthTest(unittest.TestCase):
    def test_equal_growth_passes(self):
        self.assertTrue(structure.checkSourceDominantGrowth(ValueGrid.fromFunction(4, lambda i, j: i + j)).passed)

    def test_growth_only_in_base_station_age_fails(self):
        self.assertFalse(structure.checkSourceDominantGrowth(ValueGrid.fromFunction(4, lambda i, j: j)).passed)


class IteratesTest(unittest.TestCase):
    def test_iterates_from_zero_stay_monotone(self):
        report = structure.checkIterates(ModelParams(aMax=10), sweeps=60)

        self.assertEqual([v for v in report.violations if v.axis in ("alphaS", "alphaB")], [])
        self.assertTrue(all(len(v.coordinates) == 3 and 1 <= v.coordinates[0] <= 60 for v in report.violations))


class CertificateBundleTest(unittest.TestCase):
    def test_only_required_checks_decide_the_result(self):
        failing = [structure.Violation((0, 0), "block", 1.0)]
        informativeFailure = structure.CertificateBundle([structure.StructureReport("monotone", [], 1e-9, structure.FULL_GRID),
                                                          structure.StructureReport("submodular", failing, 1e-9, structure.FULL_GRID)], True)
        requiredFailure = structure.CertificateBundle([structure.StructureReport("monotone", failing, 1e-9, structure.FULL_GRID),
                                                       structure.StructureReport("submodular", [], 1e-9, structure.FULL_GRID)], True)

        self.assertTrue(informativeFailure.requiredPassed)
        self.assertFalse(informativeFailure.allPassed)
        self.assertIn("informativeNotice", informativeFailure.toDict())
        self.assertFalse(requiredFailure.requiredPassed)
        self.assertNotIn("informativeNotice", requiredFailure.toDict())

    def test_violated_assumption_adds_notice_and_still_runs_every_check(self):
        params = ModelParams(aMax=8, lambdaS=0.9, lambdaC=0.6)
        values, policy, _ = solver.valueIteration(params)

        bundle = structure.certify(values, policy, params)
        document = bundle.toDict()

        self.assertFalse(bundle.assumptionSatisfied)
        self.assertIn("assumptionNotice", document)
        self.assertEqual(len(document["checks"]), len(structure.CERTIFICATE_CHECKS))

    def test_get_report(self):
        params = ModelParams(aMax=4)
        values, policy, _ = solver.valueIteration(params)

        bundle = structure.certify(values, policy, params)

        self.assertEqual(bundle.getReport("monotone").checkName, "monotone")
