"""
ReportWriter - Writes command results to the output directory.
Follows Single Responsibility Principle - only turns results into files.
CSV and JSON are deterministic (sorted keys, round-trip floats); anything that changes
between identical runs (timestamps, versions, wall times) goes to metadata.json only.
"""
import json
import logging
import math
import platform
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pydantic
import scipy

from flow.trajectory import write_monitor_csv, write_rows

logger = logging.getLogger(__name__)

METADATA_FILE = "metadata.json"


def to_jsonable(value):
    """numpy scalars and arrays, paths and tuples to plain JSON values; non-finite floats as strings"""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else repr(value)
    if isinstance(value, Path):
        return value.as_posix()
    return value


def dumps(data):
    return json.dumps(to_jsonable(data), indent=2, sort_keys=True) + "\n"


class ReportWriter:
    """Writes the artifacts of one run into its output directory."""

    def __init__(self, out):
        self.out = Path(out)
        self.written = []

    def _path(self, name):
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        self.written.append(name)
        return path

    def write_json(self, name, data):
        path = self._path(name)
        path.write_text(dumps(data))
        logger.debug("wrote %s", path)
        return path

    def write_csv(self, name, header, rows):
        path = self._path(name)
        write_rows(path, header, rows)
        logger.debug("wrote %s (%d columns)", path, len(header))
        return path

    def write_monitor(self, monitor, name="monitor.csv"):
        path = self._path(name)
        write_monitor_csv(path, monitor)
        return path

    def write_energies(self, report, name="energies.csv"):
        return self.write_csv(name, report.columns(), report.rows())

    def write_verdict(self, verdict, name="verdict.json"):
        return self.write_json(name, verdict)

    def write_metadata(self, config, stage_timer, started, status):
        """Timestamps, library versions and wall times per stage"""
        path = self.out / METADATA_FILE
        self.out.mkdir(parents=True, exist_ok=True)
        metadata = {
            "command": config.command,
            "seed": config.seed,
            "status": status,
            "started": started.isoformat(),
            "finished": now().isoformat(),
            "wall_times": dict(stage_timer.durations),
            "total_wall_time": stage_timer.total(),
            "versions": {
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "pydantic": pydantic.VERSION,
            },
            "artifacts": sorted(self.written),
        }
        path.write_text(dumps(metadata))
        return path


def now():
    return datetime.now(timezone.utc)
