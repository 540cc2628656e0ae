"""
Exact verification of the unramified GSpin x GL Rankin-Selberg identities.
Root data, dual-group characters, Satake parameters and truncated L-factors over Q.
"""

import logging
import os

from .config_manager import ConfigManager, default_config_dir, get_config_manager
from .error_handler import get_error_handler
from .logging_system import LogCategory, get_logging_system, initialize_logging

__version__ = "1.0.0"


def setup_application_logging():
    """Set up structured logging and the error handler; returns (success, logger)."""
    try:
        logging_system = initialize_logging(
            log_dir=get_config_manager().log_dir(),
            app_name=os.environ.get('APP_NAME', 'spinor_lfunc')
        )
        logger = logging_system.get_logger(LogCategory.SYSTEM)
        logger.info("Application logging system initialized")
        get_error_handler()
        logger.info("Error handling system initialized")
        return True, logger
    except OSError as e:
        logging.basicConfig(
            level=logging.INFO,
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )
        logger = logging.getLogger(__name__)
        logger.error(f"Failed to initialize enhanced logging system: {e}")
        return False, logger


def initialize_configuration_system():
    """Load and validate the configuration; returns (config_manager, is_valid)."""
    config_manager = ConfigManager(default_config_dir())
    logger = get_logging_system().get_logger(LogCategory.CONFIGURATION)

    is_valid = config_manager.validate_all_configs()
    if not is_valid:
        logger.warning("Configuration validation found issues, continuing with fallback defaults")

    health = config_manager.health_check()
    logger.info(f"Configuration system health: {health['overall_status']}")
    for issue in health.get('issues', []):
        logger.error(f"  - {issue}")
    return config_manager, is_valid
