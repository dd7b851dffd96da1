"""
CLI package - Manifest parsing, command execution, invariant suites and report files.
"""
from .check_suite import InvariantCheck, format_table, forms6_suite, lattice_suite, run_suites
from .manifest import COMMANDS, BackgroundSpec, ExperimentSpec, RunConfig, load_run_config, parse_term
from .reports import ReportWriter
from .runner import ExperimentRunner, run

__all__ = [
    "COMMANDS",
    "BackgroundSpec",
    "ExperimentRunner",
    "ExperimentSpec",
    "InvariantCheck",
    "ReportWriter",
    "RunConfig",
    "format_table",
    "forms6_suite",
    "lattice_suite",
    "load_run_config",
    "parse_term",
    "run",
    "run_suites",
]
