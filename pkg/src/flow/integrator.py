"""
FlowIntegrator - Method-of-lines RK4 integration of the (reparametrized) Type IIA flow.
Follows Single Responsibility Principle - only advances the state and records what it sees.
"""
import logging
import math

import numpy as np

from errors import DegenerateError, StepUnderflowError
from flow.rhs import evaluate
from flow.state import Monitor, MonitorSample
from flow.trajectory import Trajectory, TrajectorySample
from lattice import curvature_proxy, exterior_derivative, l2_norm, riemann_sup, sobolev_norm
from lattice.pointwise import primitivity_max

logger = logging.getLogger(__name__)

# Stability radius of classic RK4 on the negative real axis
RK4_STABILITY_RADIUS = 2.78

# Harmonic drift above which the run is flagged
COHOMOLOGY_DRIFT_WARNING = 1e-9


def rhs_norm(evaluation):
    return math.hypot(l2_norm(evaluation.dphi), l2_norm(evaluation.domega))


class FlowIntegrator:
    """Advances a TypeIIAState one RK4 step at a time."""

    def __init__(self, state, config):
        self.state = state
        self.config = config
        self.monitor = Monitor()
        self.samples = []
        self.step_count = 0
        self.dt = None

        # Run state
        self.flow_started = False
        self.flow_complete = False
        self.stop_reason = None
        self._evaluation = None

        # Conserved quantities of the initial data
        self.phi_class = state.phi.mean()
        self.omega_class = state.omega.mean()
        self.phi_background = self.phi_class.to_field(state.grid)
        self.omega_background = self.omega_class.to_field(state.grid)

    def start_flow(self):
        """Check the initial data and record the first sample"""
        logger.info(
            "starting %s flow on %s, t_max=%g",
            "reparametrized" if self.config.reparametrized else "primary", self.state.grid, self.config.t_max,
        )
        self._evaluation = self._evaluate(self.state, "initial")
        self.flow_started = True
        self._record()
        self._check_stop()

    def step_flow(self):
        """Perform one RK4 step. Returns True if the flow continues, False if complete."""
        if not self.flow_started:
            self.start_flow()
        if self.flow_complete:
            return False

        remaining = self.config.t_max - self.state.time
        dt = self.time_step(self._evaluation.structure.normsq)
        final = dt >= remaining
        if final:
            dt = remaining
        elif dt < self.config.min_dt:
            self._fail(StepUnderflowError, "time step underflow", dt=dt)

        self.state = self._rk4(dt)
        self.dt = dt
        self.step_count += 1
        self._evaluation = self._evaluate(self.state, "step")

        if final:
            self._finish("t_max")
        else:
            self._check_stop()
        if self.flow_complete or self.step_count % self.config.monitor_stride == 0:
            self._record()
        return not self.flow_complete

    def run_to_completion(self):
        """Integrate until a stop condition is met"""
        if not self.flow_started:
            self.start_flow()
        while self.step_flow():
            pass
        return self.get_trajectory()

    def time_step(self, normsq):
        """Parabolic bound dt_safety * 2.78 / (sup |phi|^2 * largest Laplacian symbol)"""
        stiffness = float(np.max(normsq)) * self.state.grid.max_symbol
        if stiffness <= 0.0:
            return self.config.t_max
        return self.config.dt_safety * RK4_STABILITY_RADIUS / stiffness

    def _rk4(self, dt):
        state = self.state
        k1 = self._evaluation
        k2 = self._evaluate(self._shift(state, k1, 0.5 * dt), "rk4 stage 2")
        k3 = self._evaluate(self._shift(state, k2, 0.5 * dt), "rk4 stage 3")
        k4 = self._evaluate(self._shift(state, k3, dt), "rk4 stage 4")
        phi = state.phi + (dt / 6.0) * (k1.dphi + 2.0 * k2.dphi + 2.0 * k3.dphi + k4.dphi)
        if self.config.reparametrized:
            omega = state.omega + (dt / 6.0) * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega)
        else:
            omega = state.omega
        return state.with_fields(phi, omega, state.time + dt)

    def _shift(self, state, evaluation, h):
        omega = state.omega + h * evaluation.domega if self.config.reparametrized else state.omega
        return state.with_fields(state.phi + h * evaluation.dphi, omega, state.time + h)

    def _evaluate(self, state, stage):
        try:
            return evaluate(state, reparametrized=self.config.reparametrized, stage=stage)
        except DegenerateError as exc:
            self.stop_reason = "degenerate"
            self.flow_complete = True
            exc.trajectory = self.get_trajectory()
            logger.error("flow degenerated at t=%.6g: %s", state.time, exc)
            raise

    def _fail(self, error, message, **context):
        self.stop_reason = "step_underflow"
        self.flow_complete = True
        raise error(message, trajectory=self.get_trajectory(), time=self.state.time, **context)

    def _check_stop(self):
        tolerance = self.config.stationary_tol
        if tolerance is not None and rhs_norm(self._evaluation) <= tolerance:
            self._finish("stationary")
        elif self.config.max_steps is not None and self.step_count >= self.config.max_steps:
            self._finish("max_steps")

    def _finish(self, reason):
        self.flow_complete = True
        self.stop_reason = reason
        logger.info("flow stopped (%s) at t=%.6g after %d steps", reason, self.state.time, self.step_count)

    def _record(self):
        state = self.state
        evaluation = self._evaluation
        structure = evaluation.structure
        drift = max((state.phi.mean() - self.phi_class).max_abs(), (state.omega.mean() - self.omega_class).max_abs())
        if drift > COHOMOLOGY_DRIFT_WARNING:
            logger.warning("harmonic parts drifted by %.3g at t=%.6g", drift, state.time)
        self.monitor.append(MonitorSample(
            t=state.time,
            rhs_l2=rhs_norm(evaluation),
            dphi_l2=l2_norm(exterior_derivative(state.phi)),
            primitivity_max=primitivity_max(state.phi, state.omega),
            sup_phi=math.sqrt(float(np.max(structure.normsq))),
            curv_proxy=curvature_proxy(structure.metric),
            min_g_eig=float(np.min(structure.min_eigenvalue)),
            h_drift=drift,
            phi_dev_w2=sobolev_norm(state.phi - self.phi_background, 2),
            omega_dev_w2=sobolev_norm(state.omega - self.omega_background, 2),
            riemann_sup=riemann_sup(structure.metric) if self.config.curvature_full else None,
        ))
        vector = evaluation.vector if self.config.store_vectors else None
        self.samples.append(TrajectorySample(state.time, state.phi, state.omega, vector))

    def is_complete(self):
        """Check if the flow has stopped"""
        return self.flow_complete

    def get_current_state(self):
        return self.state

    def get_stop_reason(self):
        return self.stop_reason

    def get_trajectory(self):
        return Trajectory(list(self.samples), self.monitor, self.config, self.stop_reason, self.step_count)


def advance(state, config):
    """Integrate from state under config; returns the sampled Trajectory (with its Monitor)"""
    return FlowIntegrator(state, config).run_to_completion()
