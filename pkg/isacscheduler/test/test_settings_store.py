import unittest
import tempfile
import os
import json

from isacscheduler import config
from isacscheduler.mdp.model import ModelParams
from isacscheduler.misc.options import Options, Option, InvalidOptionError
from isacscheduler.misc.settings_store import RunConfig, InvalidConfigError


class RunConfigTest(unittest.TestCase):
    def setUp(self):
        self._tempDir = tempfile.TemporaryDirectory()
        self._configPath = os.path.join(self._tempDir.name, "run.json")

    def tearDown(self):
        self._tempDir.cleanup()

    def test_defaults(self):
        runConfig = RunConfig.fromSources(environ={})

        self.assertEqual(runConfig.model, ModelParams())
        self.assertEqual(runConfig.model.aMax, 30)
        self.assertEqual(runConfig.model.gamma, 0.95)
        self.assertEqual(runConfig.sim.s0, (1, 1))
        self.assertEqual(runConfig.output.directory, config.DEFAULT_OUTPUT_DIR)
        self.assertEqual(runConfig.output.formats, ("csv", "json", "ascii"))

    def test_document_values_replace_defaults(self):
        self._writeDocument({"model": {"gamma": 0.9, "aMax": 10}, "sim": {"s0": [2, 3]}})

        runConfig = RunConfig.fromSources(self._configPath, environ={})

        self.assertEqual(runConfig.model.gamma, 0.9)
        self.assertEqual(runConfig.model.aMax, 10)
        self.assertEqual(runConfig.model.lambdaS, ModelParams().lambdaS)
        self.assertEqual(runConfig.sim.s0, (2, 3))

    def test_flags_take_precedence_over_document(self):
        self._writeDocument({"model": {"gamma": 0.9}})

        runConfig = RunConfig.fromSources(self._configPath, {"model.gamma": "0.5"}, environ={})

        self.assertEqual(runConfig.model.gamma, 0.5)

    def test_environment_variable_sets_output_directory(self):
        self._writeDocument({"output": {"directory": "fromFile"}})
        environ = {config.OUTPUT_DIR_ENV_VAR: "fromEnvironment"}

        fromEnvironment = RunConfig.fromSources(self._configPath, environ=environ)
        fromFlag = RunConfig.fromSources(self._configPath, {"output.directory": "fromFlag"}, environ=environ)

        self.assertEqual(fromEnvironment.output.directory, "fromEnvironment")
        self.assertEqual(fromFlag.output.directory, "fromFlag")

    def test_empty_environment_variable_is_ignored(self):
        runConfig = RunConfig.fromSources(environ={config.OUTPUT_DIR_ENV_VAR: ""})

        self.assertEqual(runConfig.output.directory, config.DEFAULT_OUTPUT_DIR)

    def test_invalid_value_names_the_option(self):
        with self.assertRaises(InvalidConfigError) as context:
            RunConfig.fromSources(overrides={"model.lambdaS": "1.5"}, environ={})

        self.assertEqual(context.exception.fieldName, "model.lambdaS")
        self.assertTrue(str(context.exception).startswith("model.lambdaS: "))

    def test_invalid_values_raise_exception(self):
        for overrides in ({"model.gamma": "1"},
                          {"model.gamma": "nan"},
                          {"model.costS": "-0.1"},
                          {"model.aMax": "1"},
                          {"model.aMax": "2.5"},
                          {"solver.tol": "0"},
                          {"sim.n": "1"},
                          {"sim.s0": "1"},
                          {"sim.s0": "-1,2"}):
            self.assertRaises(InvalidConfigError, lambda: RunConfig.fromSources(overrides=overrides, environ={}))

    def test_unknown_group_or_option_raise_exception(self):
        self.assertRaises(InvalidConfigError, lambda: RunConfig.fromSources(overrides={"model.lambda": "0.5"}, environ={}))
        self.assertRaises(InvalidConfigError, lambda: RunConfig.fromSources(overrides={"plot.width": "3"}, environ={}))
        self.assertRaises(InvalidConfigError, lambda: RunConfig.fromDict({"plot": {}}))
        self.assertRaises(InvalidConfigError, lambda: RunConfig.fromDict({"model": 3}))

    def test_initial_state_outside_the_grid_raises_exception(self):
        with self.assertRaises(InvalidConfigError) as context:
            RunConfig.fromSources(overrides={"model.aMax": "5", "sim.s0": "6,1"}, environ={})

        self.assertEqual(context.exception.fieldName, "sim.s0")

    def test_malformed_document_raises_exception(self):
        with open(self._configPath, "w", encoding="utf-8") as file:
            file.write("{\"model\": {\"gamma\": ")

        self.assertRaises(InvalidConfigError, lambda: RunConfig.fromSources(self._configPath, environ={}))

    def test_missing_document_raises_exception(self):
        missingPath = os.path.join(self._tempDir.name, "nothing.json")

        self.assertRaises(InvalidConfigError, lambda: RunConfig.fromSources(missingPath, environ={}))

    def test_formats_are_parsed_and_validated(self):
        runConfig = RunConfig.fromSources(overrides={"output.formats": "csv,pgm,csv"}, environ={})

        self.assertEqual(runConfig.output.formats, ("csv", "pgm"))

        with self.assertRaises(InvalidConfigError) as context:
            RunConfig.fromSources(overrides={"output.formats": "csv,xlsx"}, environ={})
        self.assertEqual(context.exception.fieldName, "output.formats")

    def test_replace_returns_a_new_configuration(self):
        runConfig = RunConfig.fromSources(environ={})

        replaced = runConfig.replace({"model.costC": 0.4})

        self.assertEqual(replaced.model.costC, 0.4)
        self.assertEqual(runConfig.model.costC, ModelParams().costC)
        self.assertRaises(InvalidConfigError, lambda: runConfig.replace({"model.costC": -1}))

    def test_flatten_uses_dotted_names(self):
        flat = RunConfig.fromSources(environ={}).flatten()

        self.assertEqual(set(flat), {name for name, _ in RunConfig.getAllOptions()})
        self.assertIn("model.lambdaS", flat)
        self.assertIn("output.formats", flat)

    def test_document_round_trip(self):
        runConfig = RunConfig.fromSources(overrides={"model.gamma": "0.8", "sim.s0": "3,2"}, environ={})

        document = json.loads(runConfig.toJson())

        self.assertEqual(document["sim"]["s0"], [3, 2])
        self.assertEqual(RunConfig.fromDict(document).flatten(), runConfig.flatten())

    def _writeDocument(self, document):
        with open(self._configPath, "w", encoding="utf-8") as file:
            json.dump(document, file)


class OptionTest(unittest.TestCase):
    class _Sample(Options):
        OPTIONS = [Option(name="rate", value=0.5, kind=float, minimum=0.0, minimumExclusive=True, maximum=1.0),
                   Option(name="count", value=2, kind=int, minimum=1)]

    def test_defaults_and_attribute_access(self):
        sample = self._Sample()

        self.assertEqual(sample.rate, 0.5)
        self.assertEqual(sample.toDict(), {"rate": 0.5, "count": 2})

    def test_exclusive_minimum(self):
        self.assertRaises(InvalidOptionError, lambda: self._Sample(rate=0))
        self.assertEqual(self._Sample(rate=1).rate, 1.0)

    def test_non_finite_and_boolean_values_are_rejected(self):
        self.assertRaises(InvalidOptionError, lambda: self._Sample(rate=float("inf")))
        self.assertRaises(InvalidOptionError, lambda: self._Sample(count=True))
        self.assertRaises(InvalidOptionError, lambda: self._Sample(count=1.5))

    def test_unknown_option_is_rejected(self):
        with self.assertRaises(InvalidOptionError) as context:
            self._Sample(size=3)

        self.assertEqual(context.exception.optionName, "size")
