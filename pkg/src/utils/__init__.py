"""
Utility functions and helpers for the simulator.
"""

from .config import create_default_config, load_scenario, load_settings, validate_config
from .logging import log_error, setup_logging

__all__ = [
    "create_default_config",
    "load_scenario",
    "load_settings",
    "log_error",
    "setup_logging",
    "validate_config",
]
