import json
import os
import shutil
import tempfile
import unittest
from unittest.mock import patch

from spinor_lfunc.config_manager import ConfigManager
from spinor_lfunc.data_models import RunConfig
from spinor_lfunc.error_handler import InvalidConfiguration

PROJECT_CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "config")


class ConfigTestCase(unittest.TestCase):
    """Temporary config directory with the shipped schemas and small defaults."""

    def setUp(self):
        """Set up test environment with temporary config directory"""
        self.test_dir = tempfile.mkdtemp()
        shutil.copytree(os.path.join(PROJECT_CONFIG_DIR, "schemas"), os.path.join(self.test_dir, "schemas"))
        self._write_defaults({
            "order": 6,
            "seed": 11,
            "jobs": 2,
            "sweep_grids": {
                "tiny": {
                    "order": 3,
                    "entries": [{"check": "unramified", "case": "a-odd", "ranks": [[1, 1]], "seeds": 1}]
                }
            }
        })
        self.config_manager = ConfigManager(self.test_dir)

    def tearDown(self):
        """Clean up test environment"""
        shutil.rmtree(self.test_dir)

    def _write_defaults(self, data):
        with open(os.path.join(self.test_dir, "defaults.json"), 'w', encoding='utf-8') as f:
            if isinstance(data, str):
                f.write(data)
            else:
                json.dump(data, f, indent=2)

    def _copy_examples(self):
        shutil.copytree(os.path.join(PROJECT_CONFIG_DIR, "examples"), os.path.join(self.test_dir, "examples"))


class TestConfigManager(ConfigTestCase):
    """Test defaults loading, fallbacks and caching"""

    def test_load_defaults(self):
        """Test loading the engine defaults"""
        defaults = self.config_manager.load_defaults()

        self.assertEqual(defaults["order"], 6)
        self.assertEqual(defaults["seed"], 11)
        self.assertIn("tiny", defaults["sweep_grids"])

    def test_caching(self):
        """Test configuration caching"""
        defaults1 = self.config_manager.load_defaults()
        defaults2 = self.config_manager.load_defaults()
        self.assertIs(defaults1, defaults2)

        defaults3 = self.config_manager.load_defaults(force_reload=True)
        self.assertIsNot(defaults1, defaults3)
        self.assertEqual(defaults1, defaults3)

    def test_missing_defaults_are_recreated(self):
        """Test fallback and automated recovery when defaults.json is missing"""
        os.remove(os.path.join(self.test_dir, "defaults.json"))
        manager = ConfigManager(self.test_dir)

        defaults = manager.load_defaults()

        self.assertEqual(defaults["order"], 8)
        self.assertEqual(list(defaults["sweep_grids"]), ["smoke"])
        self.assertTrue(os.path.exists(os.path.join(self.test_dir, "defaults.json")))
        self.assertEqual(manager.get_error_summary()["category_breakdown"], {"configuration": 1})

    def test_invalid_json_handling(self):
        """Test handling of invalid JSON files"""
        self._write_defaults('{"order": 6,')
        manager = ConfigManager(self.test_dir)

        defaults = manager.load_defaults()

        self.assertEqual(defaults["order"], 8)
        summary = manager.get_error_summary()
        self.assertEqual(summary["total_errors"], 1)
        self.assertEqual(summary["severity_breakdown"], {"high": 1})

    def test_schema_violation_falls_back(self):
        """Test defaults violating the schema are replaced by the built-in ones"""
        self._write_defaults({"order": -1, "seed": 0, "jobs": 1})
        defaults = ConfigManager(self.test_dir).load_defaults()
        self.assertEqual(defaults["order"], 8)

    def test_permission_error_handling(self):
        """Test handling of permission errors"""
        with patch('builtins.open', side_effect=PermissionError("Permission denied")):
            manager = ConfigManager(self.test_dir)
            defaults = manager.load_defaults()

        self.assertEqual(defaults["seed"], 7)
        self.assertEqual(manager.get_error_summary()["category_breakdown"], {"file_io": 1})

    def test_default_jobs(self):
        """Test SPINOR_LFUNC_JOBS overrides the configured concurrency"""
        with patch.dict(os.environ, {"SPINOR_LFUNC_JOBS": "3"}):
            self.assertEqual(self.config_manager.default_jobs(), 3)
        for value in ("0", "many"):
            with patch.dict(os.environ, {"SPINOR_LFUNC_JOBS": value}):
                self.assertEqual(self.config_manager.default_jobs(), 2)
        with patch.dict(os.environ, {}, clear=True):
            self.assertEqual(self.config_manager.default_jobs(), 2)

    def test_budgets(self):
        """Test configured budgets, with built-in values for keys the file omits"""
        self.assertEqual(self.config_manager.budget("sym_power"), 12)
        self.assertEqual(self.config_manager.budget("oracle_rank"), 4)

        defaults = self.config_manager.load_defaults()
        self._write_defaults(dict(defaults, budgets={"sym_power": 3, "oracle_weight": 5}))
        self.config_manager.load_defaults(force_reload=True)
        self.assertEqual(self.config_manager.budget("sym_power"), 3)
        self.assertEqual(self.config_manager.budget("oracle_weight"), 5)
        self.assertEqual(self.config_manager.budget("oracle_rank"), 4)

        with self.assertRaises(InvalidConfiguration):
            self.config_manager.budget("memory")

    def test_budget_beyond_table_limit_falls_back(self):
        """Test an oracle budget above the weight-table ceiling fails validation"""
        defaults = self.config_manager.load_defaults()
        self._write_defaults(dict(defaults, order=5, budgets={"oracle_rank": 9}))
        manager = ConfigManager(self.test_dir)

        self.assertEqual(manager.load_defaults()["order"], 8)
        self.assertEqual(manager.budget("oracle_rank"), 4)

    def test_log_dir(self):
        """Test SPINOR_LFUNC_LOG_DIR overrides the configured log directory"""
        with patch.dict(os.environ, {}, clear=True):
            self.assertEqual(self.config_manager.log_dir(), "logs")
            defaults = self.config_manager.load_defaults()
            self._write_defaults(dict(defaults, log_dir="var/verification-logs"))
            self.config_manager.load_defaults(force_reload=True)
            self.assertEqual(self.config_manager.log_dir(), "var/verification-logs")
        with patch.dict(os.environ, {"SPINOR_LFUNC_LOG_DIR": "/tmp/elsewhere"}):
            self.assertEqual(self.config_manager.log_dir(), "/tmp/elsewhere")

    def test_sweep_grid(self):
        """Test grid lookup by name"""
        self.assertEqual(self.config_manager.sweep_grid("tiny")["order"], 3)
        with self.assertRaises(InvalidConfiguration) as ctx:
            self.config_manager.sweep_grid("acceptance")
        self.assertEqual(ctx.exception.details["available"], ["tiny"])

    def test_shipped_acceptance_grid_is_split_only(self):
        """Test quasi-split cases live in their own diagnostic grid, not in the acceptance grid"""
        manager = ConfigManager(PROJECT_CONFIG_DIR)

        acceptance = {entry.get("case") for entry in manager.sweep_grid("acceptance")["entries"]}
        self.assertNotIn("a-even-quasi-split", acceptance)
        self.assertNotIn("b-even-quasi-split", acceptance)
        diagnostic = {entry["case"] for entry in manager.sweep_grid("quasi-split")["entries"]}
        self.assertEqual(diagnostic, {"a-even-quasi-split", "b-even-quasi-split"})
        self.assertEqual(sorted(manager.load_defaults()["sweep_grids"]), ["acceptance", "quasi-split", "smoke"])

    def test_clear_cache(self):
        """Test cache clearing"""
        self.config_manager.load_defaults()
        self.config_manager.get_schema("run-config")

        self.assertIsNotNone(self.config_manager._defaults_cache)
        self.assertIn("run-config", self.config_manager._schema_cache)

        self.config_manager.clear_cache()

        self.assertIsNone(self.config_manager._defaults_cache)
        self.assertEqual(self.config_manager._schema_cache, {})


class TestRunConfigLoading(ConfigTestCase):
    """Test run configurations from dicts and files"""

    def test_random_source_defaults(self):
        """Test order, seed and jobs come from the defaults"""
        with patch.dict(os.environ, {}, clear=True):
            config = self.config_manager.load_run_config({"subcommand": "verify", "case": "a-odd", "n": 1, "m": 1})

        self.assertIsInstance(config, RunConfig)
        self.assertEqual(config.order, 6)
        self.assertEqual(config.seed, 11)
        self.assertEqual(config.jobs, 2)
        self.assertEqual(config.source, "random")
        self.assertEqual(config.output_format, "json")

    def test_explicit_source_has_no_seed(self):
        """Test explicit parameters leave the seed unset"""
        config = self.config_manager.load_run_config({
            "subcommand": "verify", "case": "a-odd", "n": 1, "m": 1, "source": "explicit",
            "parameters": {"pi": {"chi0": "16", "chi": ["2"]}, "tau": ["3"]}
        })
        self.assertIsNone(config.seed)
        self.assertEqual(config.parameters["tau"], ["3"])

    def test_schema_violation(self):
        """Test a configuration outside the schema"""
        with self.assertRaises(InvalidConfiguration) as ctx:
            self.config_manager.load_run_config({"subcommand": "verify", "n": 0})
        self.assertIn("violates schema", str(ctx.exception))

        with self.assertRaises(InvalidConfiguration):
            self.config_manager.load_run_config({"subcommand": "verify", "colour": "red"})

    def test_partial_quasi_split_triple(self):
        """Test a, alpha and beta must come together"""
        with self.assertRaises(InvalidConfiguration):
            self.config_manager.load_run_config({
                "subcommand": "verify", "source": "explicit",
                "parameters": {"pi": {"chi0": "9", "chi": ["5"], "a": "2"}}
            })

    def test_inconsistent_quasi_split_triple(self):
        """Test alpha^2 - a beta^2 must equal chi0"""
        with self.assertRaises(InvalidConfiguration) as ctx:
            self.config_manager.load_run_config({
                "subcommand": "verify", "case": "a-even-quasi-split", "n": 1, "m": 2, "source": "explicit",
                "parameters": {"pi": {"chi0": "1", "chi": ["5"], "a": "2", "alpha": "9", "beta": "6"}}
            })
        self.assertIn("expected chi0 = 1", str(ctx.exception))

    def test_failed_invariants(self):
        """Test RunConfig validation errors surface"""
        with self.assertRaises(InvalidConfiguration) as ctx:
            self.config_manager.load_run_config({"subcommand": "verify", "source": "explicit"})
        self.assertEqual(ctx.exception.details["errors"], ["explicit source needs parameter values"])

    def test_unreadable_file(self):
        """Test a missing run configuration file"""
        with self.assertRaises(InvalidConfiguration):
            self.config_manager.load_run_config(os.path.join(self.test_dir, "missing.json"))

    def test_examples(self):
        """Test every shipped example loads and validates"""
        self._copy_examples()

        names = self.config_manager.get_example_configs()

        self.assertEqual(names, sorted(names))
        self.assertIn("a-odd-smallest", names)
        self.assertTrue(self.config_manager.validate_all_configs())
        config = self.config_manager.load_run_config(os.path.join(self.test_dir, "examples", "acceptance-sweep.json"))
        self.assertEqual((config.subcommand, config.grid, config.seed, config.jobs), ("sweep", "acceptance", 0, 4))
        self.assertEqual(self.config_manager.load_example_config("b-odd-siegel")["parameters"]["omega"], "6")
        self.assertIsNone(self.config_manager.load_example_config("missing"))

    def test_invalid_example_fails_validation(self):
        """Test validate_all_configs reports a bad example"""
        self._copy_examples()
        with open(os.path.join(self.test_dir, "examples", "broken.json"), 'w', encoding='utf-8') as f:
            json.dump({"subcommand": "verify", "order": -3}, f)

        self.assertFalse(self.config_manager.validate_all_configs())

    def test_validate_report(self):
        """Test report schema errors are listed"""
        errors = self.config_manager.validate_report({"schema": 1, "check": "unramified"})
        self.assertEqual(len(errors), 1)


class TestHealthCheck(ConfigTestCase):
    """Test the configuration health check"""

    def test_healthy(self):
        """Test a complete configuration directory"""
        self._copy_examples()
        health = self.config_manager.health_check()

        self.assertEqual(health["overall_status"], "healthy")
        self.assertEqual(health["checks"]["schema:report"]["status"], "ok")
        self.assertNotIn("issues", health)

    def test_degraded_without_examples(self):
        """Test missing examples only degrade"""
        health = self.config_manager.health_check()

        self.assertEqual(health["overall_status"], "degraded")
        self.assertEqual(health["checks"]["examples"]["status"], "warning")

    def test_unhealthy_with_invalid_defaults(self):
        """Test invalid JSON in defaults.json"""
        self._copy_examples()
        self._write_defaults("not json")

        health = self.config_manager.health_check()

        self.assertEqual(health["overall_status"], "unhealthy")
        self.assertEqual(health["checks"]["defaults"]["status"], "error")
        self.assertEqual(len(health["issues"]), 1)

    def test_missing_directory(self):
        """Test a configuration directory that does not exist"""
        health = ConfigManager(os.path.join(self.test_dir, "absent")).health_check()

        self.assertEqual(health["overall_status"], "unhealthy")
        self.assertIn("Configuration directory does not exist", health["issues"])


if __name__ == '__main__':
    unittest.main()
