"""Logging configuration and error types for cholreg."""
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

LOG_LEVEL_ENV = "CHOLREG_LOG_LEVEL"


def setup_logger(
    log_file: Optional[Path] = None,
    level: Optional[int] = None,
    max_size: int = 5 * 1024 * 1024,  # 5MB
    backup_count: int = 3
) -> None:
    """Set up logging configuration with rotation.

    When ``level`` is omitted it is read from ``CHOLREG_LOG_LEVEL``
    (default ``WARNING``).
    """
    if level is None:
        level = level_from_env()

    file_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    console_formatter = logging.Formatter(
        '%(levelname)s: %(message)s'
    )

    handlers = []

    # Console goes to stderr, stdout carries reports
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(console_formatter)
    handlers.append(console_handler)

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=max_size,
            backupCount=backup_count
        )
        file_handler.setFormatter(file_formatter)
        handlers.append(file_handler)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    root_logger.handlers = handlers


def level_from_env(default: str = "WARNING") -> int:
    """Resolve the log level named by ``CHOLREG_LOG_LEVEL``."""
    name = os.getenv(LOG_LEVEL_ENV, default).upper()
    level = getattr(logging, name, None)
    return level if isinstance(level, int) else getattr(logging, default)


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance with the given name."""
    return logging.getLogger(name)


# Custom exception classes
class CholRegError(Exception):
    """Base exception for cholreg errors."""
    pass


class ConfigError(CholRegError):
    """Configuration-related errors."""
    pass


class ValidationError(CholRegError):
    """Invalid input passed to a library function."""
    pass


class DimensionError(ValidationError):
    """Matrix or sample sizes outside the n < p regime."""
    pass


class DomainError(ValidationError):
    """Scalar argument outside the function's domain."""
    pass


class NumericalError(CholRegError):
    """A factorization or iteration failed on the given data."""
    pass


class NotPositiveDefinite(NumericalError):
    """Cholesky pivot fell below the positive-definiteness threshold."""
    pass


class RankDeficient(NumericalError):
    """Samples are linearly dependent (numerically)."""
    pass


class NoConvergence(NumericalError):
    """Iterative solver hit its iteration cap."""
    pass


class DegenerateInput(NumericalError):
    """Input is degenerate for the requested statistic."""
    pass
