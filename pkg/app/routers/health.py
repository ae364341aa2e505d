"""Health check endpoints"""

from fastapi import APIRouter
from datetime import datetime
import numpy as np
import scipy

from app.models.schemas import HealthResponse
from app.config import settings
from app.services.runner import VERSION

router = APIRouter()


@router.get("/health", response_model=HealthResponse)
async def health_check():
    """
    Health check endpoint

    Returns the health status and the numerical stack in use
    """
    return HealthResponse(
        status="healthy",
        timestamp=datetime.utcnow(),
        version=VERSION,
        numerics={
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        jobs=settings.LAB_JOBS
    )


@router.get("/")
async def root():
    """Root endpoint"""
    return {
        "message": settings.APP_NAME,
        "version": VERSION,
        "docs": "/docs",
        "health": "/health",
        "experiments": "/api/v1/experiments"
    }
