"""Logging setup: one stream handler, every record stamped with the active trace id."""
import logging
from contextvars import ContextVar
from typing import Optional, Union

from inclab.config import settings

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s trace_id=%(trace_id)s %(message)s"

# HTTP request or CLI invocation currently running
trace_id_var: ContextVar[str] = ContextVar("trace_id", default="-")


class TraceIdFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        record.trace_id = trace_id_var.get()
        return True


def setup_logging(level: Optional[Union[int, str]] = None) -> None:
    """
    Configure the root logger; repeated calls only move the levels.

    Engine loggers (per-level and per-k progress at DEBUG) follow
    INCLAB_ENGINE_LOG_LEVEL when it is set, the root level otherwise.
    """
    level = settings.LOG_LEVEL if level is None else level
    logging.basicConfig(level=level, format=LOG_FORMAT)
    root = logging.getLogger()
    root.setLevel(level)
    for handler in root.handlers:
        if not any(isinstance(f, TraceIdFilter) for f in handler.filters):
            handler.addFilter(TraceIdFilter())
    logging.getLogger("inclab.engine").setLevel(settings.INCLAB_ENGINE_LOG_LEVEL or level)
