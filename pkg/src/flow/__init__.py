"""
Flow package - The Type IIA flow, its DeTurck reparametrization, time integration and gauge reconstruction.
"""
from .gauge import GaugeResult, gauge_reconstruct
from .integrator import FlowIntegrator, advance
from .rhs import (
    deturck_ricci_vector,
    deturck_vector,
    rhs_primary,
    rhs_reparametrized,
    soliton_residual,
    stationarity_report,
)
from .state import FlowConfig, Monitor, MonitorSample, TypeIIAState
from .trajectory import Trajectory, TrajectorySample, read_trajectory, write_monitor_csv, write_trajectory

__all__ = [
    "FlowConfig",
    "FlowIntegrator",
    "GaugeResult",
    "Monitor",
    "MonitorSample",
    "Trajectory",
    "TrajectorySample",
    "TypeIIAState",
    "advance",
    "deturck_ricci_vector",
    "deturck_vector",
    "gauge_reconstruct",
    "read_trajectory",
    "rhs_primary",
    "rhs_reparametrized",
    "soliton_residual",
    "stationarity_report",
    "write_monitor_csv",
    "write_trajectory",
]
