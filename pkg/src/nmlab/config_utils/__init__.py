"""
Configuration utilities.

JSON configuration, environment overrides and logging setup.
"""

from .nmlab_config import (
    CONFIG,
    DEFAULT_CONFIG,
    configure_logging,
    get_consequence_cap,
    get_setting,
    load_config,
    load_environment,
)

__all__ = [
    'CONFIG',
    'DEFAULT_CONFIG',
    'configure_logging',
    'get_consequence_cap',
    'get_setting',
    'load_config',
    'load_environment',
]
