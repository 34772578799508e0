"""Trace ids and the unified error body."""
import logging
import uuid
from typing import Any, Optional

from fastapi import Request, status
from fastapi.responses import JSONResponse

from inclab.core.error_codes import BusinessException, ErrorCode
from inclab.core.logging_config import trace_id_var


logger = logging.getLogger(__name__)

STATUS_BY_CODE = {
    ErrorCode.RESOURCE_NOT_FOUND[0]: status.HTTP_404_NOT_FOUND,
    ErrorCode.SWEEP_RUN_NOT_FOUND[0]: status.HTTP_404_NOT_FOUND,
    ErrorCode.DATABASE_ERROR[0]: status.HTTP_500_INTERNAL_SERVER_ERROR,
    ErrorCode.INTERNAL_ERROR[0]: status.HTTP_500_INTERNAL_SERVER_ERROR,
}


def error_response(status_code: int, error_code: tuple[str, str], trace_id: str,
                   details: Optional[Any] = None) -> JSONResponse:
    code, message = error_code
    return JSONResponse(
        status_code=status_code,
        content={"code": code, "message": message, "trace_id": trace_id, "details": details},
    )


def request_trace_id(request: Request) -> str:
    return getattr(request.state, "trace_id", None) or str(uuid.uuid4())


async def error_handler_middleware(request: Request, call_next):
    """Bind a trace id for the request; domain errors become 400/404, anything else 500."""
    trace_id = str(uuid.uuid4())
    request.state.trace_id = trace_id
    token = trace_id_var.set(trace_id)

    try:
        return await call_next(request)
    except BusinessException as e:
        logger.warning("%s %s -> %s", request.method, request.url.path, e)
        status_code = STATUS_BY_CODE.get(e.code, status.HTTP_400_BAD_REQUEST)
        return error_response(status_code, (e.code, e.message), trace_id, e.details)
    except Exception:
        logger.exception("unhandled error on %s %s", request.method, request.url.path)
        return error_response(status.HTTP_500_INTERNAL_SERVER_ERROR, ErrorCode.INTERNAL_ERROR, trace_id)
    finally:
        trace_id_var.reset(token)
