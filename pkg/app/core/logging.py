"""
Structured logging configuration for the quasiboson verification toolkit.

This module sets up structured JSON logging with contextual information
(run id, suite name) so long verification runs can be traced.
"""

import logging
import logging.config
import sys
from typing import Any, Dict, Optional

import structlog
from pythonjsonlogger import jsonlogger

from app.core.config import get_settings

settings = get_settings()

SERVICE_NAME = "quasiboson-verifier"
SERVICE_VERSION = "1.0.0"


class _CurrentStderr:
    """Writes to whatever sys.stderr is at call time (test runners swap it)."""

    def write(self, message: str) -> int:
        return sys.stderr.write(message)

    def flush(self) -> None:
        sys.stderr.flush()


class ServiceContextProcessor:
    """
    Custom processor to add service context to log entries.
    """

    def __call__(self, logger: Any, name: str, event_dict: Dict[str, Any]) -> Dict[str, Any]:
        """
        Add service context to log entries.

        Args:
            logger: Logger instance
            name: Logger name
            event_dict: Event dictionary

        Returns:
            Dict: Enhanced event dictionary with context
        """
        event_dict.update({
            "service": SERVICE_NAME,
            "version": SERVICE_VERSION,
            "environment": settings.environment
        })
        return event_dict


def setup_logging(level: Optional[str] = None) -> None:
    """
    Configure structured logging for the application.

    Sets up both standard Python logging and structlog. Output goes to
    stderr: stdout is reserved for CSV and JSON emitted by the CLI.

    Args:
        level: Optional override of the configured log level
    """
    log_level = (level or settings.log_level).upper()

    logging_config = {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "json": {
                "()": jsonlogger.JsonFormatter,
                "format": "%(asctime)s %(name)s %(levelname)s %(message)s",
                "datefmt": "%Y-%m-%d %H:%M:%S"
            },
            "console": {
                "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                "datefmt": "%Y-%m-%d %H:%M:%S"
            }
        },
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "stream": _CurrentStderr(),
                "formatter": "json" if settings.environment == "production" else "console",
                "level": log_level
            }
        },
        "loggers": {
            "": {
                "handlers": ["console"],
                "level": log_level,
                "propagate": False
            },
            "uvicorn": {
                "handlers": ["console"],
                "level": "INFO",
                "propagate": False
            }
        }
    }

    logging.config.dictConfig(logging_config)

    processors = [
        structlog.contextvars.merge_contextvars,
        structlog.processors.add_log_level,
        structlog.processors.TimeStamper(fmt="iso"),
        ServiceContextProcessor(),
        structlog.processors.CallsiteParameterAdder(
            parameters=[structlog.processors.CallsiteParameter.FUNC_NAME]
        ),
    ]

    if settings.environment == "production":
        processors.append(structlog.processors.JSONRenderer())
    else:
        processors.extend([
            structlog.dev.set_exc_info,
            structlog.dev.ConsoleRenderer(colors=False)
        ])

    structlog.configure(
        processors=processors,
        wrapper_class=structlog.make_filtering_bound_logger(
            getattr(logging, log_level)
        ),
        context_class=dict,
        logger_factory=structlog.PrintLoggerFactory(file=_CurrentStderr()),
        cache_logger_on_first_use=True
    )


def get_logger(name: str) -> structlog.BoundLogger:
    """
    Get a configured structlog logger instance.

    Args:
        name: Logger name (typically __name__)

    Returns:
        structlog.BoundLogger: Configured logger instance
    """
    return structlog.get_logger(name)


class RunIDContext:
    """
    Context manager for run id tracking in logs.
    """

    def __init__(self, run_id: str):
        self.run_id = run_id

    def __enter__(self):
        structlog.contextvars.bind_contextvars(run_id=self.run_id)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        structlog.contextvars.unbind_contextvars("run_id")


class VerificationContext:
    """
    Context manager binding the running suite and its probed range to log entries.
    """

    def __init__(self, suite: str, n_max: Optional[int] = None, dim: Optional[int] = None):
        self.suite = suite
        self.n_max = n_max
        self.dim = dim

    def __enter__(self):
        context_vars = {"suite": self.suite}
        if self.n_max is not None:
            context_vars["n_max"] = self.n_max
        if self.dim is not None:
            context_vars["dim"] = self.dim

        structlog.contextvars.bind_contextvars(**context_vars)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        vars_to_unbind = ["suite"]
        if self.n_max is not None:
            vars_to_unbind.append("n_max")
        if self.dim is not None:
            vars_to_unbind.append("dim")

        structlog.contextvars.unbind_contextvars(*vars_to_unbind)
