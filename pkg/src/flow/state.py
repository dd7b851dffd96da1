"""
state - The evolving Type IIA pair, the flow configuration and the monitor time series.
Follows Single Responsibility Principle - only holds flow data; right-hand sides live in rhs.py.
"""
import logging
from dataclasses import asdict, dataclass, fields
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from config import get_config
from errors import ConstraintError, PrimitivityError
from forms6 import standard_omega, standard_phi
from lattice import FormField, exterior_derivative
from lattice.grid import DIM
from lattice.pointwise import primitivity_max, require_positive

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TypeIIAState:
    """(phi, omega) at a time, with the constant reference metric of the gauge"""

    phi: FormField
    omega: FormField
    time: float = 0.0
    reference: np.ndarray = None

    def __post_init__(self):
        if self.phi.degree != 3 or self.omega.degree != 2:
            raise ValueError("a Type IIA state pairs a 3-form with a 2-form")
        if not self.phi.grid.same_as(self.omega.grid):
            raise ValueError("phi and omega live on different grids")
        if self.reference is None:
            object.__setattr__(self, "reference", np.eye(DIM))

    @classmethod
    def standard(cls, grid, scale=1.0):
        """The flat normal-form structure, constant on the grid"""
        return cls(FormField.constant(grid, standard_phi(scale)), FormField.constant(grid, standard_omega()))

    @property
    def grid(self):
        return self.phi.grid

    def with_fields(self, phi, omega, time=None):
        return TypeIIAState(phi, omega, self.time if time is None else time, self.reference)

    def closedness(self):
        """max of |d phi| and |d omega|"""
        return max(exterior_derivative(self.phi).max_abs(), exterior_derivative(self.omega).max_abs())

    def validate(self, closed_tol=1e-10, primitive_tol=1e-9):
        """Check closedness, pointwise primitivity and positivity; returns the structure fields"""
        closed = self.closedness()
        if closed > closed_tol:
            raise ConstraintError("state is not closed", time=self.time, closedness=closed)
        primitivity = primitivity_max(self.phi, self.omega)
        if primitivity > primitive_tol:
            raise PrimitivityError("state is not primitive", time=self.time, residual=primitivity)
        return require_positive(self.phi, self.omega, time=self.time)


class FlowConfig(BaseModel):
    """Integration settings for advance()"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    scheme: Literal["rk4"] = "rk4"
    dt_safety: float = Field(0.5, gt=0.0, le=1.0)
    t_max: float = Field(1.0, gt=0.0)
    monitor_stride: int = Field(10, ge=1)
    reparametrized: bool = True
    stationary_tol: Optional[float] = Field(1e-12, gt=0.0)
    max_steps: Optional[int] = Field(None, ge=1)
    min_dt: float = Field(1e-12, gt=0.0)
    curvature_full: bool = False
    store_vectors: bool = True

    @classmethod
    def from_preset(cls, name=None, **overrides):
        preset = get_config(name)
        values = {key: preset[key] for key in ("dt_safety", "t_max", "monitor_stride", "stationary_tol")}
        values.update(overrides)
        return cls(**values)


@dataclass(frozen=True)
class MonitorSample:
    t: float
    rhs_l2: float
    dphi_l2: float
    primitivity_max: float
    sup_phi: float
    curv_proxy: float
    min_g_eig: float
    h_drift: float
    phi_dev_w2: float
    omega_dev_w2: float
    riemann_sup: Optional[float] = None


# Core columns first, then the extras documented in the README
COLUMNS = ("t", "rhs_l2", "dphi_l2", "primitivity_max", "sup_phi", "curv_proxy", "min_g_eig", "h_drift")
EXTRA_COLUMNS = ("phi_dev_w2", "omega_dev_w2")


class Monitor:
    """Append-only time series of flow diagnostics"""

    def __init__(self):
        self.samples = []

    def append(self, sample):
        self.samples.append(sample)
        logger.info(
            "t=%.6g rhs_l2=%.3e sup_phi=%.6g min_g_eig=%.6g h_drift=%.3e",
            sample.t, sample.rhs_l2, sample.sup_phi, sample.min_g_eig, sample.h_drift,
        )

    def columns(self):
        names = COLUMNS + EXTRA_COLUMNS
        if any(sample.riemann_sup is not None for sample in self.samples):
            names = names + ("riemann_sup",)
        return names

    def rows(self):
        names = self.columns()
        return [[asdict(sample)[name] for name in names] for sample in self.samples]

    def series(self, name):
        if name not in {field.name for field in fields(MonitorSample)}:
            raise KeyError(name)
        return np.array([getattr(sample, name) for sample in self.samples], dtype=float)

    def last(self):
        return self.samples[-1] if self.samples else None

    def __len__(self):
        return len(self.samples)

