import os
import copy
import json
import logging
import importlib.resources
from pathlib import Path
from typing import Any, Optional
from logging.handlers import RotatingFileHandler

from dotenv import load_dotenv

PACKAGE_DIR = Path(__file__).resolve().parent.parent
CONFIG_PATH = PACKAGE_DIR / 'project_modules_configs' / 'config_nmlab' / 'nmlab_config.json'

DEFAULT_CAP = 1_000_000

DEFAULT_CONFIG = {
    "logging": {
        "level": "INFO",
        "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        "log_file": "nmlab.log",
        "max_size_bytes": 1048576,
        "backup_count": 3,
        "log_dir": "logs"
    },
    "semantics": {
        "consequence_cap": DEFAULT_CAP,
        "memo_size": 65536
    },
    "monadicity": {
        "default_budget": 7,
        "prune": True,
        "jobs": 1
    },
    "machine": {
        "default_max_steps": 10000
    },
    "reduction": {
        "theorem_search_max_subformulas": 9,
        "theorem_search_cap": 2000000
    },
    "reports": {
        "default_format": "text"
    }
}


def load_config(config_path: Optional[Path] = None) -> dict:
    """
    Load nmlab_config.json.

    The file next to the package is tried first, then the package resource.
    Any failure falls back to DEFAULT_CONFIG with a warning.

    Args:
        config_path: Optional explicit path to a JSON config file.

    Returns:
        The configuration dictionary.
    """
    try:
        path = Path(config_path) if config_path else CONFIG_PATH
        if path.exists():
            with open(path, 'r', encoding='utf-8') as f:
                return json.load(f)

        # Fallback to package resources
        config_file = importlib.resources.files('nmlab.project_modules_configs.config_nmlab').joinpath('nmlab_config.json')
        with config_file.open('r', encoding='utf-8') as f:
            return json.load(f)
    except Exception as e:
        logging.warning(f"Could not load config file, using built-in defaults: {e}")
        return copy.deepcopy(DEFAULT_CONFIG)


# Load config once at module import time
CONFIG = load_config()


def get_setting(section: str, key: str, default: Any = None) -> Any:
    """Return CONFIG[section][key], or ``default`` when either level is missing."""
    return CONFIG.get(section, {}).get(key, default)


def configure_logging(level: Optional[str] = None) -> None:
    """
    Configure the root logger with a console handler and a rotating file handler.

    Does nothing when the root logger already has handlers.

    Args:
        level: Optional level name overriding the configured one.
    """
    root_logger = logging.getLogger()
    if root_logger.handlers:
        logging.debug("Logging already configured, skipping reconfiguration")
        return

    log_config = CONFIG.get('logging', {})
    log_level = getattr(logging, (level or log_config.get('level', 'INFO')).upper(), logging.INFO)
    log_format = log_config.get('format', DEFAULT_CONFIG['logging']['format'])
    log_file_name = log_config.get('log_file', 'nmlab.log')
    max_size = log_config.get('max_size_bytes', 1048576)
    backup_count = log_config.get('backup_count', 3)

    logs_dir = Path(log_config.get('log_dir', 'logs'))
    if not logs_dir.is_absolute():
        logs_dir = PACKAGE_DIR / logs_dir

    formatter = logging.Formatter(log_format)

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    root_logger.setLevel(log_level)
    root_logger.addHandler(console_handler)

    try:
        logs_dir.mkdir(parents=True, exist_ok=True)
        log_file_path = logs_dir / log_file_name
        file_handler = RotatingFileHandler(log_file_path, maxBytes=max_size, backupCount=backup_count)
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)
        logging.debug(f"Logging to: {log_file_path.absolute()}")
    except OSError as e:
        logging.warning(f"File logging disabled, cannot write to {logs_dir}: {e}")


def load_environment() -> Optional[Path]:
    """
    Load the first .env file found without overriding variables already set.

    Looks in the current directory, the package directory and ~/.nmlab.

    Returns:
        The path that was loaded, or None.
    """
    possible_env_paths = [
        Path.cwd() / '.env',
        PACKAGE_DIR / '.env',
        Path.home() / '.nmlab' / '.env',
    ]
    try:
        for env_path in possible_env_paths:
            if env_path.exists():
                load_dotenv(dotenv_path=env_path, override=False)
                logging.info(f"Loaded environment variables from .env file at {env_path}")
                return env_path
    except Exception as e:
        logging.warning(f"Error loading environment variables: {e}")
    return None


def get_consequence_cap() -> int:
    """
    Cap on variable assignments for consequence checks.

    NMLAB_CAP wins when it is a positive integer, then the config value,
    then 10**6.
    """
    raw = os.environ.get('NMLAB_CAP')
    if raw:
        try:
            cap = int(raw)
            if cap > 0:
                return cap
        except ValueError:
            pass
        logging.warning(f"Ignoring NMLAB_CAP={raw!r}: not a positive integer")

    cap = get_setting('semantics', 'consequence_cap', DEFAULT_CAP)
    if not isinstance(cap, int) or cap <= 0:
        logging.warning(f"Invalid consequence_cap in config ({cap!r}), using {DEFAULT_CAP}")
        cap = DEFAULT_CAP
    return cap
