"""FastAPI Main Application"""

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
import uvicorn
import logging
import time
from datetime import datetime

from app.routers import health, experiments
from app.config import settings
from app.core.errors import LabError
from app.models.schemas import ErrorResponse
from app.services.monitoring import configure_logging, log_request, monitoring_service
from app.services.runner import VERSION

# configure logging
configure_logging()
logger = logging.getLogger(__name__)

# initialize FastAPI app
app = FastAPI(
    title=settings.APP_NAME,
    description="Blaschke products, the Schur algorithm and weighted area integrals of derivatives",
    version=VERSION,
    docs_url="/docs",
    redoc_url="/redoc"
)

# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.ALLOWED_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# middleware for request logging and monitoring
@app.middleware("http")
async def log_requests(request: Request, call_next):
    """Log all requests with their duration"""
    start_time = time.time()

    response = await call_next(request)

    process_time = time.time() - start_time

    log_request(
        method=request.method,
        path=request.url.path,
        status_code=response.status_code,
        duration=process_time
    )

    response.headers["X-Process-Time"] = str(process_time)
    return response


@app.exception_handler(LabError)
async def lab_exception_handler(request: Request, exc: LabError):
    """Numerical preconditions that the request itself violated"""
    logger.warning(f"{type(exc).__name__} on {request.url.path}: {str(exc)}")
    return JSONResponse(
        status_code=422,
        content=ErrorResponse(
            error=type(exc).__name__, detail=str(exc), timestamp=datetime.utcnow()
        ).model_dump(mode="json")
    )


# exception handler
@app.exception_handler(Exception)
async def global_exception_handler(request: Request, exc: Exception):
    """Global exception handler"""
    monitoring_service.track_exception(exc, {"path": request.url.path, "method": request.method})
    return JSONResponse(
        status_code=500,
        content=ErrorResponse(
            error="Internal server error",
            detail=str(exc) if settings.DEBUG else "An error occurred",
            timestamp=datetime.utcnow()
        ).model_dump(mode="json")
    )


# include routers
app.include_router(health.router, tags=["Health"])
app.include_router(experiments.router, prefix="/api/v1", tags=["Experiments"])


@app.on_event("startup")
async def startup_event():
    """Application startup event"""
    logger.info(f"{settings.APP_NAME} started")
    logger.info(f"Environment: {settings.ENVIRONMENT}")
    logger.info(f"Worker processes: {settings.LAB_JOBS}")
    logger.info(f"Results directory: {settings.RESULTS_DIR}")


@app.on_event("shutdown")
async def shutdown_event():
    """Application shutdown event"""
    logger.info(f"{settings.APP_NAME} shutting down")


if __name__ == "__main__":
    uvicorn.run(
        "app.main:app",
        host="0.0.0.0",
        port=8000,
        reload=settings.DEBUG
    )
