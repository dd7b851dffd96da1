"""
manifest - Run configuration: preset, INI manifest and command-line flags, validated in that order.

    [background]    n, shape, length, scale
    [perturbation]  one key per term: degree; multi-index; frequency vector; amplitude; exact|harmonic
    [flow]          FlowConfig fields
    [experiment]    k_max, seeds, eps, mode_budget, s_steps, basin_epsilon, basin_order,
                    cross_validate, gauge_time, interpolation, amplitude, samples, trajectory
    [output]        directory
"""
import configparser
import logging
import math
from pathlib import Path
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from config import get_config
from errors import ConfigError
from flow import FlowConfig
from lattice import Grid
from stability import PerturbationTerm

logger = logging.getLogger(__name__)

COMMANDS = ("check", "flow-run", "linearize", "perturb-and-flow", "decay-report")

SECTIONS = ("background", "perturbation", "flow", "experiment", "output")


def _split(value):
    if isinstance(value, str):
        return [item.strip() for item in value.replace(";", ",").split(",") if item.strip()]
    return value


class BackgroundSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int = Field(8, ge=4)
    shape: Optional[Tuple[int, int, int, int, int, int]] = None
    length: float = Field(2 * math.pi, gt=0)
    scale: float = Field(1.0, gt=0)

    @field_validator("shape", mode="before")
    @classmethod
    def _parse_shape(cls, value):
        if isinstance(value, str) and value.strip().lower() in ("", "none", "full"):
            return None
        return _split(value)

    def grid(self):
        return Grid(self.n, self.length, self.shape)


class ExperimentSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    k_max: int = Field(2, ge=0, le=10)
    seeds: Optional[List[int]] = None
    eps: List[float] = [1e-3, 5e-4]
    mode_budget: int = Field(1, ge=0, le=2)
    s_steps: int = Field(64, ge=1)
    basin_epsilon: float = Field(0.1, gt=0)
    basin_order: int = Field(2, ge=0)
    cross_validate: bool = True
    gauge_time: float = Field(1.0, gt=0)
    interpolation: Literal["linear", "cubic", "spectral"] = "spectral"
    amplitude: float = Field(1e-3, gt=0)
    samples: int = Field(1000, ge=1)
    trajectory: Optional[Path] = None

    @field_validator("seeds", mode="before")
    @classmethod
    def _parse_seeds(cls, value):
        """'0-19' is a range, '1, 4, 9' a list"""
        if isinstance(value, str) and "-" in value and "," not in value:
            first, last = (int(part) for part in value.split("-", 1))
            return list(range(first, last + 1))
        return _split(value)

    @field_validator("eps", mode="before")
    @classmethod
    def _parse_eps(cls, value):
        return _split(value)


class RunConfig(BaseModel):
    """Everything a command needs; built before any computation starts"""

    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    command: Literal["check", "flow-run", "linearize", "perturb-and-flow", "decay-report"]
    out: Path
    seed: int = Field(0, ge=0)
    preset: str = "ci"
    manifest: Optional[Path] = None
    background: BackgroundSpec = BackgroundSpec()
    flow: FlowConfig = FlowConfig()
    experiment: ExperimentSpec = ExperimentSpec()
    perturbation: List[PerturbationTerm] = []

    def grid(self):
        return self.background.grid()

    def seeds(self):
        return self.experiment.seeds if self.experiment.seeds is not None else [self.seed]

    def summary(self):
        """Deterministic JSON-ready description of the run"""
        return {
            "command": self.command,
            "seed": self.seed,
            "preset": self.preset,
            "background": self.background.model_dump(mode="json"),
            "flow": self.flow.model_dump(mode="json"),
            "experiment": self.experiment.model_dump(mode="json"),
            "perturbation": [
                {
                    "degree": term.degree,
                    "labels": list(term.labels),
                    "frequency": list(term.frequency),
                    "amplitude": term.amplitude,
                    "kind": term.kind,
                }
                for term in self.perturbation
            ],
        }


def parse_term(text):
    """'2; 3; 1,0,0,0,0,0; 1e-2; exact' -> PerturbationTerm"""
    parts = [part.strip() for part in text.split(";")]
    if len(parts) != 5:
        raise ConfigError("perturbation term needs five ';'-separated fields", term=text)
    degree, labels, frequency, amplitude, kind = parts
    try:
        labels = tuple(int(label) for label in labels if label.isdigit())
        frequency = tuple(int(entry) for entry in _split(frequency))
        if len(frequency) != 6:
            raise ValueError("frequency vector needs six entries")
        return PerturbationTerm(int(degree), labels, frequency, float(amplitude), kind)
    except ValueError as exc:
        raise ConfigError(f"invalid perturbation term: {exc}", term=text) from exc


def read_manifest(path):
    """Sections of key=value as plain dictionaries"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError("manifest not found", path=str(path))
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"manifest does not parse: {exc}", path=str(path)) from exc
    unknown = [section for section in parser.sections() if section not in SECTIONS]
    if unknown:
        raise ConfigError("unknown manifest sections", sections=unknown)
    return {section: dict(parser.items(section)) for section in parser.sections()}


def _flow_values(values):
    cleaned = {}
    for key, value in values.items():
        if isinstance(value, str) and value.strip().lower() == "none":
            value = None
        cleaned[key] = value
    return cleaned


def load_run_config(command, manifest=None, out=None, seed=None, grid_n=None, preset=None):
    """Preset defaults, overlaid by the manifest, overlaid by flags"""
    if command not in COMMANDS:
        raise ConfigError("unknown command", command=command)
    preset_name = preset or "ci"
    defaults = get_config(preset_name)
    sections = read_manifest(manifest) if manifest is not None else {}

    background = {"n": defaults["n"], "shape": defaults["shape"], "length": defaults["length"]}
    background.update(sections.get("background", {}))
    if grid_n is not None:
        background["n"] = grid_n
        if background.get("shape") is not None:
            shape = _split(background["shape"])
            background["shape"] = [min(int(size), grid_n) for size in shape]

    flow = {key: defaults[key] for key in ("dt_safety", "t_max", "monitor_stride", "stationary_tol")}
    flow.update(_flow_values(sections.get("flow", {})))

    terms = [parse_term(text) for _, text in sorted(sections.get("perturbation", {}).items())]
    output = sections.get("output", {})
    out = out if out is not None else output.get("directory")
    if out is None:
        raise ConfigError("no output directory: pass --out or set [output] directory")
    unknown = set(output) - {"directory"}
    if unknown:
        raise ConfigError("unknown [output] keys", keys=sorted(unknown))

    try:
        config = RunConfig(
            command=command,
            out=out,
            seed=seed if seed is not None else 0,
            preset=preset_name,
            manifest=manifest,
            background=BackgroundSpec(**background),
            flow=FlowConfig(**flow),
            experiment=ExperimentSpec(**sections.get("experiment", {})),
            perturbation=terms,
        )
        config.grid()
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc.error_count()} error(s)\n{exc}") from exc

    validate_paths(config)
    logger.info("run config: %s on %s, seed %d", command, config.grid(), config.seed)
    return config


def validate_paths(config):
    if config.out.exists() and not config.out.is_dir():
        raise ConfigError("output path exists and is not a directory", out=str(config.out))
    trajectory = config.experiment.trajectory
    if config.command == "decay-report" and trajectory is not None and not (trajectory / "index.json").is_file():
        raise ConfigError("stored trajectory not found", trajectory=str(trajectory))
