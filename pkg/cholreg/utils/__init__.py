"""Logging and error types.

``Config`` lives in ``cholreg.utils.config``; it depends on the core package
and is not re-exported here.
"""
from .logger import (
    CholRegError,
    ConfigError,
    NumericalError,
    ValidationError,
    get_logger,
    setup_logger,
)

__all__ = [
    "CholRegError",
    "ConfigError",
    "NumericalError",
    "ValidationError",
    "get_logger",
    "setup_logger",
]
