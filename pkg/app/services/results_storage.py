"""Result persistence: CSV records and JSON run summaries"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Iterable, Optional, Union

from app.config import settings
from app.models.schemas import CSV_COLUMNS, ExperimentRecord, RunSummary

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def format_cell(value) -> str:
    """CSV cell: empty for absent values, 17 significant digits for floats"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


class ResultsStorageService:
    """Local results directory for experiment outputs"""

    def __init__(self, results_dir: Optional[PathLike] = None):
        self.results_dir = Path(results_dir or settings.RESULTS_DIR)

    def _resolve(self, path: PathLike) -> Path:
        path = Path(path)
        if not path.is_absolute() and path.parent == Path("."):
            path = self.results_dir / path
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def save_records(self, records: Iterable[ExperimentRecord], csv_path: PathLike) -> Path:
        """
        Write records with the fixed column set

        Args:
            records: Experiment records in emission order
            csv_path: Target file; bare file names land in the results directory

        Returns:
            The path written
        """
        path = self._resolve(csv_path)
        count = 0
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for record in records:
                writer.writerow([format_cell(getattr(record, column)) for column in CSV_COLUMNS])
                count += 1
        logger.info(f"Saved {count} records to {path}")
        return path

    def save_summary(self, summary: RunSummary, json_path: PathLike) -> Path:
        """
        Write the run summary (fits, violation counts, metadata) as JSON

        Args:
            summary: Run summary
            json_path: Target file; bare file names land in the results directory

        Returns:
            The path written
        """
        path = self._resolve(json_path)
        data = summary.model_dump(mode="json")
        path.write_text(json.dumps(data, indent=2, sort_keys=True), encoding="utf-8")
        logger.info(f"Saved summary to {path}")
        return path

    def load_summary(self, json_path: PathLike) -> Optional[dict]:
        """
        Read a summary written by save_summary

        Returns:
            Summary data if found, None otherwise
        """
        path = Path(json_path)
        if not path.exists():
            return None
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            logger.error(f"Summary read error for {path}: {str(e)}")
            return None


# Singleton instance
results_service = ResultsStorageService()
