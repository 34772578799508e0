"""Request ID and timing headers."""
import re
import time
import uuid

from fastapi import Request

_SAFE_ID = re.compile(r"^[A-Za-z0-9._-]{1,64}$")


async def request_id_middleware(request: Request, call_next):
    """Echo a well-formed X-Request-ID (or mint one) and report server time in X-Process-Time-Ms."""
    supplied = request.headers.get("X-Request-ID", "")
    request_id = supplied if _SAFE_ID.match(supplied) else uuid.uuid4().hex
    request.state.request_id = request_id

    start = time.perf_counter()
    response = await call_next(request)
    response.headers["X-Request-ID"] = request_id
    response.headers["X-Process-Time-Ms"] = f"{(time.perf_counter() - start) * 1000:.1f}"
    return response
