import copy
import json
import os
from typing import Any, Dict, List, Optional, Union

from jsonschema import ValidationError, validate

from .data_models import RunConfig
from .error_handler import ErrorContext, ErrorHandler, InvalidConfiguration, graceful_degradation
from .logging_system import LogCategory, get_logging_system, performance_monitor
from .rational import to_fraction

logger = get_logging_system().get_logger(LogCategory.CONFIGURATION)

DEFAULTS_FILE = "defaults.json"


def default_config_dir() -> str:
    """SPINOR_LFUNC_CONFIG_DIR, or the config/ directory next to the package."""
    project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    return os.environ.get("SPINOR_LFUNC_CONFIG_DIR", os.path.join(project_root, "config"))


class ConfigManager:
    """Loads engine defaults and run configurations, validated against JSON schemas, with fallbacks."""

    def __init__(self, config_dir: Optional[str] = None):
        self.config_dir = config_dir or default_config_dir()
        self.schemas_dir = os.path.join(self.config_dir, "schemas")
        self.examples_dir = os.path.join(self.config_dir, "examples")

        self._defaults_cache: Optional[Dict[str, Any]] = None
        self._schema_cache: Dict[str, Optional[Dict[str, Any]]] = {}

        self.error_handler = ErrorHandler(logger)
        self._register_recovery_callbacks()

    def _register_recovery_callbacks(self):
        self.error_handler.register_recovery_callback('create_default_config', self._create_default_config_file)
        self.error_handler.register_recovery_callback('validate_json_syntax', self._validate_json_syntax)

    def _create_default_config_file(self, error_info):
        """Recovery callback: write the built-in defaults where defaults.json is missing."""
        file_path = error_info.context.file_path
        if not file_path or os.path.basename(file_path) != DEFAULTS_FILE:
            return
        try:
            os.makedirs(os.path.dirname(file_path) or ".", exist_ok=True)
            with open(file_path, 'w', encoding='utf-8') as f:
                json.dump(self._get_default_defaults(), f, indent=2, sort_keys=True)
            logger.info(f"Created default configuration file: {file_path}")
        except OSError as e:
            logger.error(f"Failed to create default config file: {e}")

    def _validate_json_syntax(self, error_info):
        """Recovery callback: log where a JSON file stops parsing."""
        file_path = error_info.context.file_path
        if not file_path or not os.path.exists(file_path):
            return
        with open(file_path, 'r', encoding='utf-8') as f:
            content = f.read()
        try:
            json.loads(content)
        except json.JSONDecodeError as e:
            logger.error(f"JSON syntax error in {file_path} at line {e.lineno}, column {e.colno}: {e.msg}")

    @performance_monitor("config_load_json_file", LogCategory.CONFIGURATION)
    def _load_json_file(self, file_path: str, fallback_data: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Load a JSON file; on any failure, record the error and return the fallback."""
        context = ErrorContext(file_path=file_path, function_name="_load_json_file")
        try:
            if not os.path.exists(file_path):
                error = FileNotFoundError(f"Configuration file not found: {file_path}")
                self.error_handler.handle_error(error, context, "config_file_not_found")
                return copy.deepcopy(fallback_data) if fallback_data else {}
            with open(file_path, 'r', encoding='utf-8') as file:
                data = json.load(file)
            logger.info(f"Loaded configuration from {file_path}")
            return data
        except json.JSONDecodeError as e:
            context.line_number = e.lineno
            context.additional_data = {"column": e.colno, "json_error": e.msg}
            self.error_handler.handle_error(e, context, "config_invalid_json")
        except PermissionError as e:
            self.error_handler.handle_error(e, context, "permission_denied")
        except OSError as e:
            self.error_handler.handle_error(e, context)
        if fallback_data:
            logger.info(f"Using fallback data for {file_path}")
        return copy.deepcopy(fallback_data) if fallback_data else {}

    def _load_schema(self, schema_name: str) -> Optional[Dict[str, Any]]:
        if schema_name not in self._schema_cache:
            schema_path = os.path.join(self.schemas_dir, f"{schema_name}-schema.json")
            try:
                with open(schema_path, 'r', encoding='utf-8') as file:
                    self._schema_cache[schema_name] = json.load(file)
            except (OSError, json.JSONDecodeError) as e:
                logger.warning(f"Could not load schema {schema_name}: {e}")
                self._schema_cache[schema_name] = None
        return self._schema_cache[schema_name]

    def get_schema(self, schema_name: str) -> Optional[Dict[str, Any]]:
        return self._load_schema(schema_name)

    def _schema_errors(self, data: Dict[str, Any], schema_name: str) -> List[str]:
        schema = self._load_schema(schema_name)
        if not schema:
            logger.warning(f"No schema available for {schema_name}, skipping validation")
            return []
        try:
            validate(instance=data, schema=schema)
        except ValidationError as e:
            path = "/".join(str(p) for p in e.absolute_path)
            return [f"{path or '<root>'}: {e.message}"]
        return []

    def _validate_config(self, data: Dict[str, Any], schema_name: str) -> bool:
        errors = self._schema_errors(data, schema_name)
        if errors:
            logger.error(f"Configuration validation failed for {schema_name}: {errors[0]}")
            return False
        logger.info(f"Configuration validation passed for {schema_name}")
        return True

    def _get_default_defaults(self) -> Dict[str, Any]:
        return {
            "order": 8,
            "seed": 7,
            "jobs": 1,
            "budgets": {
                "sym_power": 12,
                "oracle_rank": 4,
                "oracle_weight": 8
            },
            "log_dir": "logs",
            "sweep_grids": {
                "smoke": {
                    "order": 4,
                    "entries": [
                        {"check": "unramified", "case": "a-odd", "ranks": [[1, 1]], "seeds": 2},
                        {"check": "case-b", "case": "b-odd", "ranks": [[1, 2]], "seeds": 2},
                        {"check": "symalg", "family": "gsp", "max_m": 1, "max_n": 1, "max_r": 2, "seeds": 1}
                    ]
                }
            }
        }

    @performance_monitor("config_load_defaults", LogCategory.CONFIGURATION)
    def load_defaults(self, force_reload: bool = False) -> Dict[str, Any]:
        """Engine defaults from defaults.json, or the built-in ones if it is missing or invalid."""
        if self._defaults_cache is not None and not force_reload:
            return self._defaults_cache

        path = os.path.join(self.config_dir, DEFAULTS_FILE)
        fallback = self._get_default_defaults()
        data = self._load_json_file(path, fallback)
        if not self._validate_config(data, "defaults"):
            logger.warning("Using fallback defaults due to validation failure")
            data = fallback

        old = self._defaults_cache
        self._defaults_cache = data
        if old != data:
            get_logging_system().log_configuration("defaults loaded", {"source": path, "order": data["order"]})
        return data

    def default_jobs(self) -> int:
        """SPINOR_LFUNC_JOBS if set to a positive integer, otherwise the configured default."""
        value = os.environ.get("SPINOR_LFUNC_JOBS")
        if value:
            try:
                jobs = int(value)
                if jobs >= 1:
                    return jobs
            except ValueError:
                pass
            logger.warning(f"Ignoring invalid SPINOR_LFUNC_JOBS={value!r}")
        return self.load_defaults()["jobs"]

    def budget(self, name: str) -> int:
        """Configured evaluation budget ("sym_power", "oracle_rank" or "oracle_weight")."""
        builtin = self._get_default_defaults()["budgets"]
        if name not in builtin:
            raise InvalidConfiguration(f"unknown budget {name!r}", available=sorted(builtin))
        return self.load_defaults().get("budgets", {}).get(name, builtin[name])

    def log_dir(self) -> str:
        """SPINOR_LFUNC_LOG_DIR if set, otherwise the configured log directory."""
        return os.environ.get("SPINOR_LFUNC_LOG_DIR") or self.load_defaults().get("log_dir", "logs")

    def sweep_grid(self, name: str) -> Dict[str, Any]:
        grids = self.load_defaults().get("sweep_grids", {})
        if name not in grids:
            raise InvalidConfiguration(f"unknown sweep grid {name!r}", available=sorted(grids))
        return grids[name]

    @performance_monitor("config_load_run_config", LogCategory.CONFIGURATION)
    def load_run_config(self, source: Union[str, Dict[str, Any]]) -> RunConfig:
        """
        Parse a RunConfig from a JSON file path or a dict.

        Raises InvalidConfiguration on schema violations, on an inconsistent
        quasi-split triple (alpha^2 - a beta^2 != chi0) and on failed invariants.
        """
        if isinstance(source, str):
            try:
                with open(source, 'r', encoding='utf-8') as f:
                    data = json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                self.error_handler.handle_error(e, ErrorContext(file_path=source, function_name="load_run_config"))
                raise InvalidConfiguration(f"cannot read run configuration {source}: {e}")
        else:
            data = source

        errors = self._schema_errors(data, "run-config")
        if errors:
            self.error_handler.handle_error(InvalidConfiguration(errors[0]), ErrorContext(
                function_name="load_run_config", additional_data={"errors": errors}), "config_schema_violation")
            raise InvalidConfiguration(f"run configuration violates schema: {errors[0]}", errors=errors)

        defaults = self.load_defaults()
        config = RunConfig(
            subcommand=data["subcommand"],
            case=data.get("case"),
            n=data.get("n"),
            m=data.get("m"),
            order=data.get("order", defaults["order"]),
            source=data.get("source", "random"),
            seed=data.get("seed", defaults["seed"] if data.get("source", "random") == "random" else None),
            count=data.get("count", 1),
            parameters=data.get("parameters", {}),
            output=data.get("output"),
            output_format=data.get("format", "json"),
            jobs=data.get("jobs", self.default_jobs()),
            grid=data.get("grid"),
        )
        _check_quasi_split_triple(config.parameters)
        result = config.validate()
        if not result.is_valid:
            raise InvalidConfiguration("; ".join(result.errors), errors=result.errors)
        get_logging_system().log_configuration("run configuration loaded", config.to_dict())
        return config

    def validate_report(self, report: Dict[str, Any]) -> List[str]:
        """Schema errors of an emitted report; empty when it conforms."""
        return self._schema_errors(report, "report")

    def validate_all_configs(self) -> bool:
        """Validate defaults and every example run configuration."""
        all_valid = self._validate_config(self.load_defaults(force_reload=True), "defaults")
        for name in self.get_example_configs():
            try:
                self.load_run_config(os.path.join(self.examples_dir, f"{name}.json"))
            except InvalidConfiguration as e:
                logger.error(f"Example {name} is invalid: {e}")
                all_valid = False
        return all_valid

    def get_example_configs(self) -> List[str]:
        """Names of the example run configurations, sorted."""
        if not os.path.isdir(self.examples_dir):
            return []
        return sorted(f[:-5] for f in os.listdir(self.examples_dir) if f.endswith('.json'))

    def load_example_config(self, example_name: str) -> Optional[Dict[str, Any]]:
        example_path = os.path.join(self.examples_dir, f"{example_name}.json")
        if not os.path.exists(example_path):
            logger.error(f"Example configuration not found: {example_name}")
            return None
        with open(example_path, 'r', encoding='utf-8') as file:
            return json.load(file)

    def clear_cache(self):
        self._defaults_cache = None
        self._schema_cache.clear()
        logger.info("Configuration cache cleared")

    @graceful_degradation(lambda self: {})
    def get_error_summary(self) -> Dict[str, Any]:
        return self.error_handler.get_error_summary()

    @performance_monitor("config_health_check", LogCategory.CONFIGURATION)
    def health_check(self) -> Dict[str, Any]:
        """Check the configuration directory, defaults, schemas and examples."""
        checks: Dict[str, Dict[str, str]] = {}
        issues: List[str] = []

        if os.path.isdir(self.config_dir):
            checks["config_directory"] = {"status": "ok", "message": "Directory exists"}
        else:
            issues.append("Configuration directory does not exist")
            checks["config_directory"] = {"status": "error", "message": "Directory missing"}

        defaults_path = os.path.join(self.config_dir, DEFAULTS_FILE)
        if not os.path.exists(defaults_path):
            checks["defaults"] = {"status": "warning", "message": "File missing, using built-in defaults"}
        else:
            try:
                with open(defaults_path, 'r', encoding='utf-8') as f:
                    errors = self._schema_errors(json.load(f), "defaults")
                if errors:
                    issues.append(f"defaults.json violates schema: {errors[0]}")
                    checks["defaults"] = {"status": "error", "message": errors[0]}
                else:
                    checks["defaults"] = {"status": "ok", "message": "File valid"}
            except json.JSONDecodeError as e:
                issues.append(f"Invalid JSON in {DEFAULTS_FILE}: {e}")
                checks["defaults"] = {"status": "error", "message": f"Invalid JSON: {e}"}

        for name in ("defaults", "run-config", "report"):
            present = self._load_schema(name) is not None
            checks[f"schema:{name}"] = ({"status": "ok", "message": "Schema loaded"} if present
                                        else {"status": "warning", "message": "Schema missing"})

        examples = self.get_example_configs()
        checks["examples"] = ({"status": "ok", "message": f"{len(examples)} example files found"} if examples
                              else {"status": "warning", "message": "No examples found"})

        if any(c["status"] == "error" for c in checks.values()):
            overall = "unhealthy"
        elif any(c["status"] == "warning" for c in checks.values()):
            overall = "degraded"
        else:
            overall = "healthy"
        result: Dict[str, Any] = {"overall_status": overall, "checks": checks}
        if issues:
            result["issues"] = issues
        return result


def _check_quasi_split_triple(parameters: Dict[str, Any]) -> None:
    for role in ("pi", "sigma"):
        data = parameters.get(role)
        if not isinstance(data, dict) or "a" not in data:
            continue
        try:
            a, alpha, beta = (to_fraction(data[k]) for k in ("a", "alpha", "beta"))
            chi0 = to_fraction(data.get("chi0", 1))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
            raise InvalidConfiguration(f"quasi-split {role} data is incomplete or malformed: {e}")
        if alpha * alpha - a * beta * beta != chi0:
            raise InvalidConfiguration(
                f"quasi-split {role} data has alpha^2 - a beta^2 = {alpha * alpha - a * beta * beta}, "
                f"expected chi0 = {chi0}")


_config_manager: Optional[ConfigManager] = None


def get_config_manager() -> ConfigManager:
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager
