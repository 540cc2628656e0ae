"""
Tests for the structured logging system.
"""

import json
import logging
import os
import shutil
import tempfile
import unittest
import uuid
from datetime import datetime, timedelta
from unittest.mock import MagicMock, patch

from spinor_lfunc import logging_system as logging_module
from spinor_lfunc import setup_application_logging
from spinor_lfunc.logging_system import (LoggingSystem, LogCategory, LogLevel, StructuredFormatter,
                                         get_logging_system, initialize_logging, log_verification,
                                         performance_monitor)


def _read_records(path):
    with open(path, 'r', encoding='utf-8') as f:
        return [json.loads(line) for line in f if line.strip()]


class LoggingTestCase(unittest.TestCase):
    """Creates a LoggingSystem in a scratch directory with a unique app name."""

    def setUp(self):
        """Set up test fixtures"""
        self.temp_dir = tempfile.mkdtemp()
        self.app_name = f"test_{uuid.uuid4().hex[:8]}"
        self.logging_system = LoggingSystem(log_dir=self.temp_dir, app_name=self.app_name,
                                            max_log_size=4096, backup_count=2)

    def tearDown(self):
        """Clean up test fixtures"""
        for logger in self.logging_system.loggers.values():
            for handler in list(logger.handlers):
                handler.close()
                logger.removeHandler(handler)
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def log_path(self, suffix):
        return os.path.join(self.temp_dir, f"{self.app_name}{suffix}.log")


class TestStructuredFormatter(unittest.TestCase):
    """Test cases for StructuredFormatter"""

    def setUp(self):
        """Set up test fixtures"""
        self.formatter = StructuredFormatter()

    def _record(self):
        record = logging.LogRecord(name="test_logger", level=logging.INFO, pathname="test.py", lineno=10,
                                   msg="Checked %s", args=("a-odd",), exc_info=None)
        record.module = "test_module"
        record.funcName = "test_function"
        return record

    def test_basic_formatting(self):
        """Test basic log record formatting"""
        log_data = json.loads(self.formatter.format(self._record()))

        self.assertEqual(log_data["level"], "INFO")
        self.assertEqual(log_data["logger"], "test_logger")
        self.assertEqual(log_data["message"], "Checked a-odd")
        self.assertEqual(log_data["function"], "test_function")
        self.assertEqual(log_data["line"], 10)
        self.assertNotIn("verdict", log_data)

    def test_extra_fields_formatting(self):
        """Test formatting with extra fields"""
        record = self._record()
        record.case_key = "a-odd:n=1:m=1:seed=0007"
        record.verdict = "pass"
        record.duration = 1.5
        record.additional_data = {"order": 8}
        record.unrelated = "dropped"

        log_data = json.loads(self.formatter.format(record))

        self.assertEqual(log_data["case_key"], "a-odd:n=1:m=1:seed=0007")
        self.assertEqual(log_data["verdict"], "pass")
        self.assertEqual(log_data["duration"], 1.5)
        self.assertEqual(log_data["additional_data"], {"order": 8})
        self.assertNotIn("unrelated", log_data)


class TestLoggingSystem(LoggingTestCase):
    """Test cases for LoggingSystem class"""

    def test_initialization(self):
        """Test logging system initialization"""
        self.assertEqual(set(self.logging_system.loggers),
                         {'main', 'error', 'performance', 'config', 'verification', 'debug'})
        self.assertTrue(os.path.exists(self.log_path("")))
        self.assertTrue(os.path.exists(self.log_path("_verification")))
        self.assertEqual(logging.getLevelName(LogLevel.VERIFICATION.value), "VERIFICATION")

    def test_get_logger_by_category(self):
        """Test getting loggers by category"""
        loggers = self.logging_system.loggers
        self.assertIs(self.logging_system.get_logger(LogCategory.SYSTEM), loggers['main'])
        self.assertIs(self.logging_system.get_logger(LogCategory.CONFIGURATION), loggers['config'])
        self.assertIs(self.logging_system.get_logger(LogCategory.VERIFICATION), loggers['verification'])
        self.assertIs(self.logging_system.get_logger(LogCategory.CHARACTERS), loggers['debug'])
        self.assertIs(self.logging_system.get_logger(LogCategory.ERROR_HANDLING), loggers['error'])

    def test_performance_logging(self):
        """Test performance metric logging"""
        self.logging_system.log_performance("unramified_identity", 2.5, additional_data={"order": 8})

        self.assertEqual(len(self.logging_system.performance_metrics), 1)
        metric = self.logging_system.performance_metrics[0]
        self.assertEqual(metric.operation, "unramified_identity")
        self.assertEqual(metric.duration, 2.5)
        self.assertTrue(metric.success)

        records = _read_records(self.log_path("_performance"))
        self.assertEqual(records[-1]["operation"], "unramified_identity")
        self.assertEqual(records[-1]["additional_data"], {"order": 8, "success": True})

    def test_verification_logging(self):
        """Test a verification outcome is written as one JSON record"""
        self.logging_system.log_verification("b-odd:n=1:m=2:seed=0003", "fail", {"first_mismatch": 2})

        records = _read_records(self.log_path("_verification"))
        self.assertEqual(len(records), 1)
        self.assertEqual(records[0]["level"], "VERIFICATION")
        self.assertEqual(records[0]["case_key"], "b-odd:n=1:m=2:seed=0003")
        self.assertEqual(records[0]["verdict"], "fail")
        self.assertIn("FAIL", records[0]["message"])
        self.assertEqual(records[0]["additional_data"], {"first_mismatch": 2})

    def test_configuration_logging(self):
        """Test configuration events"""
        self.logging_system.log_configuration("defaults loaded", {"order": 8})

        records = _read_records(self.log_path("_config"))
        self.assertEqual(records[-1]["message"], "defaults loaded")
        self.assertEqual(records[-1]["category"], "configuration")

    def test_new_log_dir_rebinds_handlers(self):
        """Test a system created in another directory takes over the category loggers"""
        other_dir = os.path.join(self.temp_dir, "moved")
        moved = LoggingSystem(log_dir=other_dir, app_name=self.app_name)
        moved.log_configuration("defaults loaded", {"order": 8})

        records = _read_records(os.path.join(other_dir, f"{self.app_name}_config.log"))
        self.assertEqual(records[-1]["message"], "defaults loaded")
        self.assertEqual(_read_records(self.log_path("_config")), [])

        handlers = list(moved.loggers['main'].handlers)
        same = LoggingSystem(log_dir=other_dir, app_name=self.app_name)
        self.assertEqual(same.loggers['main'].handlers, handlers)

    def test_debug_records_stay_out_of_main_log(self):
        """Test category loggers write to their own files"""
        self.logging_system.get_logger(LogCategory.LFACTORS).debug("series inverted")

        self.assertEqual(_read_records(self.log_path("_debug"))[-1]["message"], "series inverted")
        self.assertEqual(_read_records(self.log_path("")), [])

    def test_empty_performance_summary(self):
        """Test the summary without metrics"""
        self.assertEqual(self.logging_system.get_performance_summary(),
                         {"message": "No performance data available"})

    def test_performance_summary(self):
        """Test performance summary generation"""
        self.logging_system.log_performance("sweep", 1.0)
        self.logging_system.log_performance("sweep", 3.0)
        self.logging_system.log_performance("char_sp", 0.5, success=False)

        summary = self.logging_system.get_performance_summary(hours=1)

        self.assertEqual(summary["total_operations"], 3)
        self.assertEqual(summary["failed_operations"], 1)
        stats = summary["operation_statistics"]["sweep"]
        self.assertEqual(stats["count"], 2)
        self.assertEqual(stats["avg_duration"], 2.0)
        self.assertEqual(stats["min_duration"], 1.0)
        self.assertEqual(stats["max_duration"], 3.0)
        self.assertEqual(summary["operation_statistics"]["char_sp"]["success_rate"], 0.0)

    def test_old_metrics_excluded_from_summary(self):
        """Test the look-back window"""
        self.logging_system.log_performance("sweep", 1.0)
        self.logging_system.performance_metrics[0].timestamp = datetime.now() - timedelta(hours=30)

        self.assertIn("message", self.logging_system.get_performance_summary(hours=24))

    def test_metrics_cleanup(self):
        """Test the metric buffer keeps the latest 1000 entries"""
        for i in range(1005):
            self.logging_system.performance_metrics.append(
                logging_module.PerformanceMetric(f"op{i}", 0.0, datetime.now(), LogCategory.PERFORMANCE))
        self.logging_system.log_performance("last", 0.1)

        self.assertEqual(len(self.logging_system.performance_metrics), 1000)
        self.assertEqual(self.logging_system.performance_metrics[-1].operation, "last")


class TestPerformanceMonitorDecorator(LoggingTestCase):
    """Test cases for performance monitor decorator"""

    def setUp(self):
        """Set up test fixtures"""
        super().setUp()
        patcher = patch.object(logging_module, "_global_logging_system", self.logging_system)
        patcher.start()
        self.addCleanup(patcher.stop)

    def test_successful_operation_monitoring(self):
        """Test monitoring of successful operations"""

        @performance_monitor("test_operation", LogCategory.VERIFICATION)
        def add(x, y):
            return x + y

        self.assertEqual(add(1, 2), 3)

        metrics = [m for m in self.logging_system.performance_metrics if m.operation == "test_operation"]
        self.assertEqual(len(metrics), 1)
        self.assertTrue(metrics[0].success)
        self.assertGreaterEqual(metrics[0].duration, 0)
        self.assertEqual(metrics[0].category, LogCategory.VERIFICATION)

    def test_failed_operation_monitoring(self):
        """Test monitoring of failed operations"""

        @performance_monitor("failing_operation")
        def failing_function():
            raise ValueError("Test error")

        with self.assertRaises(ValueError):
            failing_function()

        metrics = [m for m in self.logging_system.performance_metrics if m.operation == "failing_operation"]
        self.assertEqual(len(metrics), 1)
        self.assertFalse(metrics[0].success)
        self.assertEqual(metrics[0].additional_data["error"], "Test error")

    def test_default_operation_name(self):
        """Test the qualified function name is used without an explicit name"""

        @performance_monitor()
        def compute():
            return 1

        compute()
        self.assertEqual(self.logging_system.performance_metrics[-1].operation, f"{__name__}.compute")
        self.assertEqual(compute.__name__, "compute")

    def test_log_verification_function(self):
        """Test the convenience function logs through the global system"""
        log_verification("a-odd:n=1:m=1:seed=0007", "pass")

        records = _read_records(self.log_path("_verification"))
        self.assertEqual(records[-1]["verdict"], "pass")


class TestGlobalFunctions(unittest.TestCase):
    """Test cases for global convenience functions"""

    def test_get_logging_system(self):
        """Test global logging system getter"""
        self.assertIs(get_logging_system(), get_logging_system())

    def test_initialize_logging(self):
        """Test logging system initialization"""
        temp_dir = tempfile.mkdtemp()
        app_name = f"test_init_{uuid.uuid4().hex[:8]}"
        try:
            with patch.object(logging_module, "_global_logging_system", None):
                system = initialize_logging(log_dir=os.path.join(temp_dir, "nested"), app_name=app_name,
                                            max_log_size=2048, backup_count=3)

                self.assertIs(get_logging_system(), system)
                self.assertEqual(system.app_name, app_name)
                self.assertEqual(system.max_log_size, 2048)
                self.assertEqual(system.backup_count, 3)
                self.assertTrue(os.path.isdir(os.path.join(temp_dir, "nested")))
            for logger in system.loggers.values():
                for handler in list(logger.handlers):
                    handler.close()
                    logger.removeHandler(handler)
        finally:
            shutil.rmtree(temp_dir, ignore_errors=True)

    def test_setup_uses_configured_log_dir(self):
        """Test application logging starts in the configured log directory"""
        temp_dir = tempfile.mkdtemp()
        app_name = f"test_setup_{uuid.uuid4().hex[:8]}"
        manager = MagicMock()
        manager.log_dir.return_value = os.path.join(temp_dir, "configured")
        try:
            with patch.object(logging_module, "_global_logging_system", None), \
                    patch("spinor_lfunc.get_config_manager", return_value=manager), \
                    patch.dict(os.environ, {"APP_NAME": app_name}):
                ok, _ = setup_application_logging()
                system = get_logging_system()

            self.assertTrue(ok)
            self.assertEqual(str(system.log_dir), os.path.join(temp_dir, "configured"))
            self.assertTrue(os.path.exists(os.path.join(temp_dir, "configured", f"{app_name}.log")))
            for logger in system.loggers.values():
                for handler in list(logger.handlers):
                    handler.close()
                    logger.removeHandler(handler)
        finally:
            shutil.rmtree(temp_dir, ignore_errors=True)


if __name__ == '__main__':
    unittest.main()
