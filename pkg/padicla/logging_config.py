# padicla/logging_config.py

import json
import logging
import uuid
from contextvars import ContextVar
from datetime import datetime, timezone
from typing import Any, Dict, Optional

from padicla.config import settings

# Context variable holding the id of the current run
run_id_context: ContextVar[str] = ContextVar('run_id', default='')

_RESERVED = {
    'name', 'msg', 'args', 'levelname', 'levelno', 'pathname', 'filename',
    'module', 'lineno', 'funcName', 'created', 'msecs', 'relativeCreated',
    'thread', 'threadName', 'processName', 'process', 'exc_info', 'exc_text',
    'stack_info', 'taskName', 'run_id',
}


class StructuredFormatter(logging.Formatter):
    """
    Formatter emitting one JSON object per record, tagged with the run id.
    Fractions and valuations in extra fields are rendered with str().
    """

    def format(self, record: logging.LogRecord) -> str:
        run_id = run_id_context.get('')

        log_entry = {
            'timestamp': datetime.now(timezone.utc).isoformat().replace('+00:00', 'Z'),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
            'run_id': run_id if run_id else None,
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno,
        }

        if record.exc_info:
            log_entry['exception'] = self.formatException(record.exc_info)

        for key, value in record.__dict__.items():
            if key not in _RESERVED:
                log_entry[key] = self._render(value)

        return json.dumps(log_entry, default=str, sort_keys=True)

    def _render(self, value: Any) -> Any:
        if isinstance(value, (str, int, bool)) or value is None:
            return value
        if isinstance(value, dict):
            return {str(k): self._render(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [self._render(item) for item in value]
        return str(value)


class _RunIdFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        record.run_id = run_id_context.get('') or '-'
        return True


def setup_logging() -> logging.Logger:
    """
    Configure logging on stderr; JSON records in production, plain lines elsewhere
    """
    if settings.ENV == "development":
        log_level = logging.INFO
    else:  # testing, production
        log_level = logging.WARNING

    if settings.LOG_LEVEL:
        log_level = getattr(logging, settings.LOG_LEVEL.upper(), logging.WARNING)

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)
    root_logger.handlers.clear()

    console_handler = logging.StreamHandler()
    console_handler.setLevel(log_level)
    console_handler.addFilter(_RunIdFilter())

    if settings.ENV == "production":
        formatter: logging.Formatter = StructuredFormatter()
    else:
        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - [%(run_id)s] - %(message)s'
        )

    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    # sympy is quiet unless something is wrong
    logging.getLogger('sympy').setLevel(logging.WARNING)

    return root_logger


def get_run_id() -> str:
    """Get the current run ID from context"""
    return run_id_context.get('')


def set_run_id(run_id: str) -> None:
    """Set the run ID for the current context"""
    run_id_context.set(run_id)


def generate_run_id() -> str:
    """Generate a new random run ID"""
    return str(uuid.uuid4())


def log_precision_event(
    operation: str,
    reason: str,
    details: Optional[Dict[str, Any]] = None,
) -> None:
    """
    Log a precision loss or cap exhaustion
    """
    logger = logging.getLogger('padicla.precision')

    log_data = {
        'event_type': 'precision_exhausted',
        'operation': operation,
        'reason': reason,
        'severity': 'warning',
        **(details or {}),
    }

    logger.warning(f"Precision exhausted in {operation}: {reason}", extra=log_data)


def log_witness_event(
    found: bool,
    level: Optional[int],
    lam: Any = None,
    mu: Any = None,
    checked_up_to: int = 0,
) -> None:
    """
    Log the outcome of a witness search
    """
    logger = logging.getLogger('padicla.witness')

    log_data = {
        'event_type': 'witness_found' if found else 'witness_missing',
        'level': level,
        'lam': lam,
        'mu': mu,
        'checked_up_to': checked_up_to,
    }

    if found:
        logger.debug(f"Witness at level {level}: lambda={lam}, mu={mu}", extra=log_data)
    else:
        logger.info(f"No witness up to N={checked_up_to}", extra=log_data)


def log_experiment_event(
    experiment: str,
    phase: str,
    details: Optional[Dict[str, Any]] = None,
    severity: str = 'info',
) -> None:
    """
    Log experiment start, finish and property failures
    """
    logger = logging.getLogger('padicla.experiment')

    log_data = {
        'event_type': f'experiment_{phase}',
        'experiment': experiment,
        'severity': severity,
        **(details or {}),
    }

    getattr(logger, severity.lower())(f"Experiment {experiment}: {phase}", extra=log_data)


def log_solver_event(
    solver: str,
    steps: int,
    loss: Any,
    status: str = 'ok',
) -> None:
    """
    Log statistics of a TS3 or coboundary solve
    """
    logger = logging.getLogger('padicla.solver')

    log_data = {
        'event_type': 'solver_statistics',
        'solver': solver,
        'steps': steps,
        'loss': loss,
        'status': status,
    }

    if status == 'ok':
        logger.debug(f"{solver}: {steps} steps, loss {loss}", extra=log_data)
    else:
        logger.warning(f"{solver} {status} after {steps} steps", extra=log_data)


# Initialize logging when module is imported
if not logging.getLogger().handlers:  # Avoid duplicate setup
    setup_logging()
