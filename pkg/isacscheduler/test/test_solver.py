import unittest

import numpy as np

from isacscheduler.mdp import model, solver
from isacscheduler.mdp.grids import ValueGrid, PolicyGrid, ThresholdCurve
from isacscheduler.mdp.model import Action, ModelParams
from isacscheduler.misc.utils import assertGridsAreEqual


class BellmanBackupTest(unittest.TestCase):
    def test_backup_of_zero_values_is_cheapest_stage_cost(self):
        params = ModelParams(aMax=6)
        backedUp = solver.bellmanBackup(ValueGrid.zeros(params.aMax), params)

        for alphaS, alphaB in model.iterStates(params.aMax):
            self.assertAlmostEqual(backedUp[alphaS, alphaB], alphaS + min(params.costS, params.costC))

    def test_backup_without_discount_ignores_values(self):
        params = ModelParams(aMax=4, gamma=0)
        values = ValueGrid.fromFunction(params.aMax, lambda i, j: 100 * i + j)
        backedUp = solver.bellmanBackup(values, params)

        for alphaS, alphaB in model.iterStates(params.aMax):
            self.assertAlmostEqual(backedUp[alphaS, alphaB], alphaS + 0.1)

    def test_one_backup_at_reference_parameters(self):
        backedUp = solver.bellmanBackup(ValueGrid.zeros(30), ModelParams())

        self.assertAlmostEqual(backedUp[3, 5], 3.1)

    def test_backup_does_not_modify_its_input(self):
        params = ModelParams(aMax=4)
        values = ValueGrid.fromFunction(params.aMax, lambda i, j: i + 2 * j)
        original = ValueGrid(values.values)

        solver.bellmanBackup(values, params)

        self.assertEqual(values, original)


class BellmanOperatorTest(unittest.TestCase):
    def setUp(self):
        self._params = ModelParams(aMax=10)
        self._random = np.random.default_rng(7)

    def _randomGrid(self):
        return ValueGrid(self._random.uniform(0, 50, size=(self._params.gridSize, self._params.gridSize)))

    def test_backup_is_a_contraction(self):
        for _ in range(20):
            values, other = self._randomGrid(), self._randomGrid()

            distance = solver.bellmanBackup(values, self._params).supDistance(solver.bellmanBackup(other, self._params))

            self.assertLessEqual(distance, self._params.gamma * values.supDistance(other) + 1e-12)

    def test_backup_is_monotone(self):
        for _ in range(20):
            values = self._randomGrid()
            larger = ValueGrid(values.values + self._random.uniform(0, 5, size=values.values.shape))

            difference = solver.bellmanBackup(larger, self._params).values - solver.bellmanBackup(values, self._params).values

            self.assertTrue(np.all(difference >= -1e-12))

    def test_greedy_action_attains_the_backup(self):
        values, policy, _ = solver.valueIteration(self._params)
        backedUp = solver.bellmanBackup(values, self._params)

        for state in model.iterStates(self._params.aMax):
            self.assertAlmostEqual(model.qValue(values, state, policy[state], self._params), backedUp[state], delta=1e-12)


class ValueIterationTest(unittest.TestCase):
    def test_zero_discount_converges_in_two_sweeps(self):
        params = ModelParams(gamma=0)

        values, policy, report = solver.valueIteration(params)

        self.assertEqual(report.iterations, 2)
        self.assertEqual(report.finalSweepDelta, 0)
        self.assertEqual(report.suboptimalityBound, 0)
        self.assertTrue(report.converged)
        for alphaS, alphaB in model.iterStates(params.aMax):
            self.assertAlmostEqual(values[alphaS, alphaB], alphaS + 0.1)
        self.assertEqual(policy, PolicyGrid.constant(params.aMax, Action.COMM))

    def test_reference_parameters_converge_to_a_nondecreasing_surface(self):
        values, policy, report = solver.valueIteration(ModelParams(), tol=1e-9, maxIter=100000)

        self.assertTrue(report.converged)
        self.assertLessEqual(report.finalSweepDelta, 1e-9)
        self.assertTrue(np.all(np.diff(values.values, axis=0) >= -1e-9))
        self.assertTrue(np.all(np.diff(values.values, axis=1) >= -1e-9))

    def test_suboptimality_bound(self):
        params = ModelParams(aMax=5, gamma=0.9)

        _, _, report = solver.valueIteration(params, tol=1e-6)

        self.assertAlmostEqual(report.suboptimalityBound, 0.9 * report.finalSweepDelta / 0.1)

    def test_wall_time_is_not_part_of_the_report_document(self):
        _, _, report = solver.valueIteration(ModelParams(aMax=3))

        self.assertNotIn("wallTime", report.toDict())
        self.assertIn("wallTime", report.toDict(includeWallTime=True))

    def test_exhausted_iterations_raise_exception_with_partial_result(self):
        with self.assertRaises(solver.NonConvergenceError) as context:
            solver.valueIteration(ModelParams(), maxIter=3)

        error = context.exception
        self.assertEqual(error.report.iterations, 3)
        self.assertFalse(error.report.converged)
        self.assertEqual(error.values.aMax, 30)
        self.assertEqual(error.policy.aMax, 30)

    def test_callback_is_called_after_every_sweep(self):
        iterations = []

        _, _, report = solver.valueIteration(ModelParams(aMax=3, gamma=0.5), callback=lambda i, v: iterations.append(i))

        self.assertEqual(iterations, list(range(1, report.iterations + 1)))

    def test_iterates_from_zero_are_nondecreasing(self):
        iterates = [np.zeros((11, 11))]

        solver.valueIteration(ModelParams(aMax=10), callback=lambda i, v: iterates.append(v.values.copy()))

        for previous, current in zip(iterates, iterates[1:]):
            self.assertTrue(np.all(current - previous >= -1e-12))

    def test_invalid_arguments_raise_exception(self):
        self.assertRaises(ValueError, lambda: solver.valueIteration(ModelParams(), tol=0))
        self.assertRaises(ValueError, lambda: solver.valueIteration(ModelParams(), maxIter=0))


class ExtractPolicyTest(unittest.TestCase):
    def test_zero_values_with_cheaper_sensing_give_all_sense(self):
        params = ModelParams(aMax=4, costS=0.1, costC=0.2)

        policy = solver.extractPolicy(ValueGrid.zeros(params.aMax), params)

        self.assertEqual(policy, PolicyGrid.constant(params.aMax, Action.SENSE))

    def test_ties_are_resolved_in_favor_of_sensing(self):
        params = ModelParams(aMax=4, costS=0.3, costC=0.3)

        policy = solver.extractPolicy(ValueGrid.zeros(params.aMax), params)

        self.assertEqual(policy, PolicyGrid.constant(params.aMax, Action.SENSE))

    def test_reference_parameters_give_a_monotone_switching_curve(self):
        params = ModelParams()
        values, policy, _ = solver.valueIteration(params)

        thresholds, singleCrossingOk = solver.extractThresholds(policy)

        self.assertTrue(singleCrossingOk)
        self.assertTrue(all(a <= b for a, b in zip(thresholds.toList(), thresholds.toList()[1:])))


class ExtractThresholdsTest(unittest.TestCase):
    def test_all_sense_policy(self):
        thresholds, singleCrossingOk = solver.extractThresholds(PolicyGrid.constant(5, Action.SENSE))

        self.assertTrue(singleCrossingOk)
        self.assertEqual(thresholds.toList(), [5] * 6)

    def test_all_comm_policy(self):
        thresholds, singleCrossingOk = solver.extractThresholds(PolicyGrid.constant(3, Action.COMM))

        self.assertTrue(singleCrossingOk)
        self.assertEqual(thresholds.toList(), [ThresholdCurve.ALL_COMM] * 4)

    def test_threshold_is_last_sensing_index(self):
        actions = np.zeros((5, 5), dtype=np.int8)
        # Fila alphaB = 2: S, S, C, C, C a lo largo de alphaS.
        actions[:, 2] = [0, 0, 1, 1, 1]

        thresholds, singleCrossingOk = solver.extractThresholds(PolicyGrid(actions))

        self.assertTrue(singleCrossingOk)
        self.assertEqual(thresholds[2], 1)
        self.assertEqual(thresholds[0], 4)

    def test_comm_to_sense_switch_is_a_violation(self):
        actions = np.zeros((3, 3), dtype=np.int8)
        actions[:, 1] = [0, 1, 0]

        thresholds, singleCrossingOk = solver.extractThresholds(PolicyGrid(actions))

        self.assertFalse(singleCrossingOk)
        self.assertEqual(thresholds.violations, [1])
        self.assertEqual(thresholds[1], 2)


class PolicyIterationTest(unittest.TestCase):
    def test_agrees_with_value_iteration(self):
        for aMax in (5, 10, 30):
            params = ModelParams(aMax=aMax)

            viValues, _, _ = solver.valueIteration(params)
            piValues, _ = solver.policyIteration(params)

            assertGridsAreEqual(piValues, viValues, 1e-6)

    def test_zero_discount_gives_all_comm(self):
        params = ModelParams(aMax=4, gamma=0)

        _, policy = solver.policyIteration(params)

        self.assertEqual(policy, PolicyGrid.constant(params.aMax, Action.COMM))

    def test_evaluation_of_a_policy_is_its_fixed_point(self):
        params = ModelParams(aMax=6)
        policy = PolicyGrid.constant(params.aMax, Action.SENSE)

        values = solver.evaluatePolicy(policy, params)

        for state in model.iterStates(params.aMax):
            self.assertAlmostEqual(values[state], model.qValue(values, state, Action.SENSE, params), places=9)

    def test_large_grid_evaluation_is_a_fixed_point(self):
        params = ModelParams(aMax=50)
        self.assertGreater(params.gridSize ** 2, solver.DIRECT_SOLVE_MAX_STATES)
        viValues, policy, _ = solver.valueIteration(params)

        values = solver.evaluatePolicy(policy, params)

        for state in model.iterStates(params.aMax):
            self.assertAlmostEqual(values[state], model.qValue(values, state, policy[state], params), delta=1e-9)
        assertGridsAreEqual(values, viValues, 1e-5)

    def test_agrees_with_value_iteration_on_a_large_grid(self):
        params = ModelParams(aMax=50)

        viValues, _, _ = solver.valueIteration(params)
        piValues, _ = solver.policyIteration(params)

        assertGridsAreEqual(piValues, viValues, 1e-6)


class ExhaustivePolicyOracleTest(unittest.TestCase):
    def test_matches_value_iteration_on_a_tiny_grid(self):
        params = ModelParams(aMax=2, gamma=0.9)

        oracleValues, oraclePolicy = solver.exhaustivePolicyOracle(params)
        values, policy, _ = solver.valueIteration(params)

        assertGridsAreEqual(oracleValues, values, 1e-8)

        deltas = model.deltaGrid(values, params)
        for state in model.iterStates(params.aMax):
            if abs(deltas[state]) > 1e-9:
                self.assertEqual(oraclePolicy[state], policy[state])

    def test_matches_value_iteration_on_the_largest_grid(self):
        params = ModelParams(aMax=3, gamma=0.9)
        self.assertEqual(params.gridSize ** 2, solver.ORACLE_MAX_STATES)

        oracleValues, _ = solver.exhaustivePolicyOracle(params)
        values, _, _ = solver.valueIteration(params, tol=1e-11)

        assertGridsAreEqual(oracleValues, values, 1e-8)

    def test_agrees_with_policy_iteration(self):
        params = ModelParams(aMax=2, gamma=0.9)

        oracleValues, _ = solver.exhaustivePolicyOracle(params)
        piValues, _ = solver.policyIteration(params)

        assertGridsAreEqual(oracleValues, piValues, 1e-9)

    def test_zero_discount_gives_stage_cost_argmin(self):
        params = ModelParams(aMax=2, gamma=0)

        _, policy = solver.exhaustivePolicyOracle(params)

        self.assertEqual(policy, PolicyGrid.constant(params.aMax, Action.COMM))

    def test_free_perfect_links_give_bounded_values(self):
        params = ModelParams(aMax=2, costS=0, costC=0, lambdaS=1, lambdaC=1)

        values, _ = solver.exhaustivePolicyOracle(params)

        self.assertTrue(np.all(np.isfinite(values.values)))
        self.assertTrue(np.all(values.values <= params.aMax / (1 - params.gamma) + 1e-9))

    def test_large_grid_raises_exception(self):
        self.assertRaises(solver.OracleSizeError, lambda: solver.exhaustivePolicyOracle(ModelParams(aMax=4)))
