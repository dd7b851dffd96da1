"""
trajectory - Immutable record of a flow run and its on-disk layout.
A trajectory directory holds one snapshot per sample (phi_NNNNN.bin, omega_NNNNN.bin and,
for reparametrized runs, vector_NNNNN.bin), monitor.csv and an index.json.
"""
import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from errors import ConfigError
from flow.state import FlowConfig, Monitor, MonitorSample, TypeIIAState
from lattice import FormField, load_field, save_field
from lattice.form_field import TensorField

logger = logging.getLogger(__name__)

INDEX_FILE = "index.json"
MONITOR_FILE = "monitor.csv"


@dataclass(frozen=True, eq=False)
class TrajectorySample:
    time: float
    phi: FormField
    omega: FormField
    vector: TensorField = None

    def state(self, reference=None):
        return TypeIIAState(self.phi, self.omega, self.time, reference)


@dataclass(eq=False)
class Trajectory:
    """Samples, monitor and the settings they were produced with"""

    samples: list
    monitor: Monitor
    config: FlowConfig
    stop_reason: str = None
    steps: int = 0
    extras: dict = field(default_factory=dict)

    @property
    def times(self):
        return [sample.time for sample in self.samples]

    @property
    def grid(self):
        return self.samples[0].phi.grid

    def initial_state(self):
        return self.samples[0].state()

    def final_state(self):
        return self.samples[-1].state()

    def has_vectors(self):
        return all(sample.vector is not None for sample in self.samples)

    def __len__(self):
        return len(self.samples)


def format_value(value):
    """Round-trip float formatting shared by every CSV writer"""
    if value is None:
        return ""
    if isinstance(value, (bool, int, str)):
        return str(value)
    return repr(float(value))


def write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(value) for value in row])


def write_monitor_csv(path, monitor):
    write_rows(path, monitor.columns(), monitor.rows())


def read_monitor_csv(path):
    monitor = Monitor()
    with Path(path).open(newline="") as handle:
        for row in csv.DictReader(handle):
            values = {key: (float(value) if value != "" else None) for key, value in row.items()}
            monitor.samples.append(MonitorSample(**values))
    return monitor


def _snapshot(directory, name, index):
    return directory / f"{name}_{index:05d}.bin"


def write_trajectory(directory, trajectory):
    """Write every sample, the monitor and an index; returns the directory"""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for index, sample in enumerate(trajectory.samples):
        save_field(_snapshot(directory, "phi", index), sample.phi)
        save_field(_snapshot(directory, "omega", index), sample.omega)
        if sample.vector is not None:
            save_field(_snapshot(directory, "vector", index), FormField(sample.vector.grid, sample.vector.values, 1))
    write_monitor_csv(directory / MONITOR_FILE, trajectory.monitor)
    index = {
        "times": [format_value(time) for time in trajectory.times],
        "vectors": trajectory.has_vectors(),
        "stop_reason": trajectory.stop_reason,
        "steps": trajectory.steps,
        "config": trajectory.config.model_dump(),
    }
    (directory / INDEX_FILE).write_text(json.dumps(index, indent=2, sort_keys=True) + "\n")
    logger.info("wrote %d trajectory samples to %s", len(trajectory), directory)
    return directory


def read_trajectory(directory):
    directory = Path(directory)
    index_path = directory / INDEX_FILE
    if not index_path.exists():
        raise ConfigError("not a trajectory directory", path=str(directory))
    index = json.loads(index_path.read_text())
    samples = []
    for position, time in enumerate(index["times"]):
        vector = None
        if index["vectors"]:
            snapshot = load_field(_snapshot(directory, "vector", position))
            vector = TensorField(snapshot.grid, snapshot.values, 1)
        samples.append(TrajectorySample(
            float(time),
            load_field(_snapshot(directory, "phi", position)),
            load_field(_snapshot(directory, "omega", position)),
            vector,
        ))
    return Trajectory(
        samples=samples,
        monitor=read_monitor_csv(directory / MONITOR_FILE),
        config=FlowConfig(**index["config"]),
        stop_reason=index["stop_reason"],
        steps=index["steps"],
    )
