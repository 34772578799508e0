"""HTTP service over the incidence engine."""
import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request, status
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from starlette.exceptions import HTTPException as StarletteHTTPException

from inclab import __version__
from inclab.api.v1 import configurations, furstenberg, incidences, spacing, sumproduct, surface, sweeps
from inclab.config import settings
from inclab.core.error_codes import ErrorCode
from inclab.core.logging_config import setup_logging
from inclab.db.session import engine, init_db
from inclab.middleware.error_handler import error_handler_middleware, error_response, request_trace_id
from inclab.middleware.request_id import request_id_middleware


setup_logging()
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    # tests manage the schema themselves
    if settings.APP_ENV != "test":
        init_db()
        logger.info("sweep ledger ready at %s", engine.url.render_as_string(hide_password=True))
    logger.info(
        "guards: max_objects=%d max_k=%d pair_limit=%d threads=%d",
        settings.INCLAB_MAX_OBJECTS, settings.INCLAB_MAX_K, settings.INCLAB_PAIR_LIMIT, settings.INCLAB_THREADS,
    )
    yield


app = FastAPI(
    title="inclab",
    description="Incidence laboratory: δ-discretized ball/tube constructions, spacing certification and incidence sweeps",
    version=__version__,
    lifespan=lifespan,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
    expose_headers=["X-Request-ID", "X-Process-Time-Ms"],
)
app.middleware("http")(request_id_middleware)
app.middleware("http")(error_handler_middleware)


@app.exception_handler(RequestValidationError)
async def request_validation_exception_handler(request: Request, exc: RequestValidationError):
    return error_response(
        status.HTTP_400_BAD_REQUEST, ErrorCode.INVALID_INPUT, request_trace_id(request), jsonable_encoder(exc.errors())
    )


@app.exception_handler(StarletteHTTPException)
async def http_exception_handler(request: Request, exc: StarletteHTTPException):
    """404 for unknown routes, INVALID_INPUT for the other HTTP errors (405, ...)."""
    error_code = ErrorCode.RESOURCE_NOT_FOUND if exc.status_code == status.HTTP_404_NOT_FOUND else ErrorCode.INVALID_INPUT
    return error_response(exc.status_code, error_code, request_trace_id(request), exc.detail)


for module in (surface, configurations, incidences, spacing, sweeps, furstenberg, sumproduct):
    app.include_router(module.router, prefix="/api/v1")


@app.get("/")
async def root():
    return {"message": "inclab API", "version": __version__, "docs": "/docs"}


@app.get("/health")
async def health_check():
    return {"status": "healthy"}
