#!/usr/bin/env python3
"""Initialize logging and configuration, then run the command line."""

import sys

from spinor_lfunc import initialize_configuration_system, setup_application_logging
from spinor_lfunc.cli import run

if __name__ == '__main__':
    logging_ok, logger = setup_application_logging()
    config_manager, config_valid = initialize_configuration_system()
    if not config_valid:
        print("⚠️  Configuration has issues; running with fallback defaults.", file=sys.stderr)
    sys.exit(run(sys.argv[1:]))
