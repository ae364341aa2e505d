"""Structured event and metric logging"""

import json
import logging
from typing import Optional, Dict, Any
from datetime import datetime

from app.config import settings

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class DimensionsFormatter(logging.Formatter):
    """Appends a record's custom_dimensions as one JSON object"""

    def format(self, record: logging.LogRecord) -> str:
        line = super().format(record)
        dimensions = getattr(record, "custom_dimensions", None)
        if dimensions:
            line = f"{line} | {json.dumps(dimensions, sort_keys=True, default=str)}"
        return line


def configure_logging(level: Optional[str] = None):
    """Root logging for the CLI and the API; dimensions are rendered only when MONITORING_ENABLED"""
    logging.basicConfig(
        level=getattr(logging, (level or settings.LOG_LEVEL).upper(), logging.INFO),
        format=LOG_FORMAT
    )
    if settings.MONITORING_ENABLED:
        for handler in logging.getLogger().handlers:
            handler.setFormatter(DimensionsFormatter(LOG_FORMAT))


class MonitoringService:
    """Structured logging wrapper: every record carries a custom_dimensions dict"""

    def __init__(self):
        self.enabled = settings.MONITORING_ENABLED
        if not self.enabled:
            logger.warning("Structured monitoring disabled")

    def track_request(
        self,
        method: str,
        path: str,
        status_code: int,
        duration: float,
        custom_properties: Optional[Dict[str, Any]] = None
    ):
        """
        Track HTTP request

        Args:
            method: HTTP method
            path: Request path
            status_code: Response status code
            duration: Request duration in seconds
            custom_properties: Additional properties to log
        """
        if not self.enabled:
            return

        properties = {
            'method': method,
            'path': path,
            'status_code': status_code,
            'duration_ms': duration * 1000,
            'timestamp': datetime.utcnow().isoformat()
        }
        if custom_properties:
            properties.update(custom_properties)

        logger.info(f"REQUEST: {method} {path} {status_code}", extra={'custom_dimensions': properties})

    def track_event(self, event_name: str, properties: Optional[Dict[str, Any]] = None):
        """
        Track an experiment event (run started, record violated a bound, ...)

        Args:
            event_name: Name of the event
            properties: Event properties
        """
        if not self.enabled:
            return

        event_props = {
            'event': event_name,
            'timestamp': datetime.utcnow().isoformat()
        }
        if properties:
            event_props.update(properties)

        logger.info(f"EVENT: {event_name}", extra={'custom_dimensions': event_props})

    def track_exception(self, exception: Exception, properties: Optional[Dict[str, Any]] = None):
        """
        Track exception

        Args:
            exception: Exception object
            properties: Additional properties
        """
        if not self.enabled:
            return

        exc_props = {
            'exception_type': type(exception).__name__,
            'exception_message': str(exception),
            'timestamp': datetime.utcnow().isoformat()
        }
        if properties:
            exc_props.update(properties)

        logger.error("EXCEPTION", exc_info=exception, extra={'custom_dimensions': exc_props})

    def track_metric(self, name: str, value: float, properties: Optional[Dict[str, Any]] = None):
        """
        Track a numeric result (integral value, fitted slope, wall time)

        Args:
            name: Metric name
            value: Metric value
            properties: Additional properties
        """
        if not self.enabled:
            return

        metric_props = {
            'metric_name': name,
            'metric_value': value,
            'timestamp': datetime.utcnow().isoformat()
        }
        if properties:
            metric_props.update(properties)

        logger.info(f"METRIC: {name}={value}", extra={'custom_dimensions': metric_props})


# Singleton instance
monitoring_service = MonitoringService()


def log_request(method: str, path: str, status_code: int, duration: float):
    """Helper function to log HTTP requests"""
    monitoring_service.track_request(method, path, status_code, duration)


def log_event(event_name: str, properties: Optional[Dict[str, Any]] = None):
    """Helper function to log events"""
    monitoring_service.track_event(event_name, properties)


def log_metric(name: str, value: float, properties: Optional[Dict[str, Any]] = None):
    """Helper function to log metrics"""
    monitoring_service.track_metric(name, value, properties)
