"""Application Configuration"""

from pydantic_settings import BaseSettings
from typing import List
import os


class Settings(BaseSettings):
    """Application settings"""

    # Application
    APP_NAME: str = "Rational Derivative Lab"
    ENVIRONMENT: str = os.getenv("ENVIRONMENT", "development")
    DEBUG: bool = os.getenv("DEBUG", "True").lower() == "true"
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    ALLOWED_ORIGINS: List[str] = ["*"]
    MONITORING_ENABLED: bool = os.getenv("MONITORING_ENABLED", "True").lower() == "true"

    # Execution
    LAB_JOBS: int = int(os.getenv("LAB_JOBS", "1"))
    RESULTS_DIR: str = os.getenv("RESULTS_DIR", "results")

    # Quadrature
    QUADRATURE_TOL: float = 1e-8
    RADIAL_TAIL: float = 1e-8
    MAX_CIRCLE_NODES: int = 2 ** 22
    EVAL_CHUNK: int = 1 << 20
    BOUNDARY_SAMPLES: int = 4096

    # Schur / Taylor sections
    TAYLOR_COUNT: int = 256
    SCHUR_MAX_LENGTH: int = 512

    # Bound checks and fits
    BOUND_TOL: float = 1e-6
    LEMMA1_C0: float = 2.0
    DOLZHENKO_GROWTH_LIMIT: float = 0.25
    FIT_TOLERANCE: float = 0.15

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()
