"""
experiment - Staged stability experiments: perturb, build a compatible structure, correct, flow,
reconstruct the gauge and measure decay. Every stage re-checks its invariants; a failure
stops the run and is reported with the stage it happened in.
"""
import logging
from dataclasses import dataclass

from errors import IIAError, NonConvergenceError, TooFarError
from flow import TypeIIAState, advance, gauge_reconstruct, stationarity_report
from forms6 import AltTensor, normal_form
from lattice import FormField, exterior_derivative, sobolev_norm
from lattice.pointwise import trig_field
from stability.compatible import DEFAULT_S_STEPS, build_compatible_phi
from stability.correction import CorrectedPair, harmonic_correction
from stability.energies import energies
from stability.stage_timer import StageTimer

logger = logging.getLogger(__name__)

STAGES = ("basin", "compatible", "correction", "flow", "gauge", "energies", "stationarity")


@dataclass(frozen=True)
class PerturbationTerm:
    """One manifest term: a harmonic form amplitude * e^I, or an exact one amplitude * d(sin(k.x) e^I)"""

    degree: int
    labels: tuple
    frequency: tuple
    amplitude: float
    kind: str = "exact"

    def __post_init__(self):
        if self.kind not in ("exact", "harmonic"):
            raise ValueError(f"unknown perturbation kind '{self.kind}'")
        expected = self.degree if self.kind == "harmonic" else self.degree - 1
        if len(self.labels) != expected:
            raise ValueError(f"a {self.kind} degree-{self.degree} term needs {expected} labels")

    def field(self, grid):
        if self.kind == "harmonic":
            return FormField.constant(grid, self.amplitude * AltTensor.basis(*self.labels))
        if len(self.labels) == 0:
            potential = trig_field(grid, AltTensor([1.0], 0), self.frequency, self.amplitude)
        else:
            potential = trig_field(grid, AltTensor.basis(*self.labels), self.frequency, self.amplitude)
        return exterior_derivative(potential)


def perturbation_field(grid, terms, degree):
    """Sum of the terms of one degree"""
    total = FormField.zeros(grid, degree)
    for term in terms:
        if term.degree == degree:
            total = total + term.field(grid)
    return total


def flat_background(grid, scale=1.0):
    """The flat normal-form structure as a CorrectedPair"""
    point = normal_form(scale)
    return CorrectedPair(FormField.constant(grid, point.phi), FormField.constant(grid, point.omega), {"projection": "flat"})


def single_mode_perturbation(grid, amplitude):
    """amplitude * cos(x1)(e^135 - e^146): closed, exact and primitive against the flat omega"""
    form = AltTensor.basis(1, 3, 5) - AltTensor.basis(1, 4, 6)
    return trig_field(grid, form, (1, 0, 0, 0, 0, 0), amplitude, kind="cos")


class StageManager:
    """Runs experiment stages in order and keeps their statuses and timings."""

    def __init__(self, stage_timer=None):
        self.stage_timer = stage_timer or StageTimer()
        self.current_stage = None
        self.statuses = {}
        self.results = {}

    def run_stage(self, stage, action):
        """Run one stage; failures are tagged with the stage and carry the partial verdict"""
        self.current_stage = stage
        self.stage_timer.start_stage_timer(stage)
        logger.info("stage %s started", stage)
        try:
            result = action()
        except IIAError as exc:
            self.statuses[stage] = "failed"
            self.stage_timer.end_stage_timer()
            exc.context.setdefault("stage", stage)
            exc.args = (f"{exc.args[0]} [stage {stage}]",) + exc.args[1:]
            exc.verdict = self.verdict(status=type(exc).__name__, error=str(exc))
            logger.error("stage %s failed: %s", stage, exc)
            raise
        self.stage_timer.end_stage_timer()
        self.statuses[stage] = "ok"
        logger.info("stage %s finished in %.3fs", stage, self.stage_timer.durations[stage])
        return result

    def skip_stage(self, stage):
        self.statuses[stage] = "skipped"

    def verdict(self, **entries):
        verdict = {"stages": {stage: self.statuses[stage] for stage in STAGES if stage in self.statuses}}
        verdict.update(self.results)
        verdict.update(entries)
        return verdict


def basin_deviation(omega, background, order=2):
    """W^{order,2} size of omega - omega~ relative to omega~"""
    return sobolev_norm(omega - background.omega_tilde, order) / sobolev_norm(background.omega_tilde, order)


def decay_state(grid, amplitude, perturbation=None):
    """Flat structure plus a closed primitive perturbation, validated"""
    background = flat_background(grid)
    bump = single_mode_perturbation(grid, amplitude) if perturbation is None else perturbation
    state = TypeIIAState(background.phi_tilde + bump, background.omega_tilde)
    state.validate()
    return state


def decay_run(grid, amplitude, config, k_max=2, perturbation=None, state=None):
    """Decay state corrected, flowed and measured"""
    if state is None:
        state = decay_state(grid, amplitude, perturbation)
    corrected = harmonic_correction(state.phi, state.omega)
    trajectory = advance(state, config)
    return trajectory, corrected, energies(trajectory, corrected, k_max)


def end_to_end_stability(
    omega,
    config,
    basin_epsilon=0.1,
    basin_order=2,
    s_steps=DEFAULT_S_STEPS,
    cross_validate=True,
    gauge_time=1.0,
    interpolation="spectral",
    k_max=2,
    manager=None,
):
    """Perturbed omega -> compatible phi -> harmonic correction -> flow -> gauge check -> verdict"""
    manager = manager or StageManager()
    grid = omega.grid
    background = flat_background(grid)

    def guard():
        deviation = basin_deviation(omega, background, basin_order)
        manager.results["basin_deviation"] = deviation
        if deviation > basin_epsilon:
            raise TooFarError("symplectic perturbation exceeds the basin", deviation=deviation, limit=basin_epsilon)

    manager.run_stage("basin", guard)
    compatible = manager.run_stage("compatible", lambda: build_compatible_phi(omega, background, s_steps))
    manager.results["measured_C"] = compatible.measured_constant
    manager.results["compatible_closedness"] = compatible.closedness
    manager.results["compatible_primitivity"] = compatible.primitivity

    state = TypeIIAState(compatible.phi, omega)
    corrected = manager.run_stage("correction", lambda: harmonic_correction(state.phi, state.omega))
    config = config.model_copy(update={"reparametrized": True})

    def flow():
        trajectory = advance(state, config)
        manager.results["stop_reason"] = trajectory.stop_reason
        manager.results["final_time"] = trajectory.final_state().time
        manager.results["final_rhs_l2"] = trajectory.monitor.last().rhs_l2
        if trajectory.stop_reason != "stationary":
            raise NonConvergenceError("flow did not reach stationarity", time=trajectory.final_state().time)
        return trajectory

    trajectory = manager.run_stage("flow", flow)
    manager.results["already_stationary"] = trajectory.steps == 0

    if cross_validate:
        gauge = manager.run_stage("gauge", lambda: gauge_cross_validation(state, config, gauge_time, interpolation))
        manager.results["gauge_discrepancy"] = gauge.discrepancy
        manager.results["gauge_omega_error"] = gauge.omega_error
    else:
        manager.skip_stage("gauge")

    report = manager.run_stage("energies", lambda: energies(trajectory, corrected, k_max))
    manager.results.update({key: value for key, value in report.summary().items() if key != "fit_window"})
    final = manager.run_stage("stationarity", lambda: stationarity_report(trajectory.final_state()))
    manager.results["final_nijenhuis"] = final["nijenhuis"]
    manager.results["final_deturck_l2"] = final["deturck_l2"]
    return manager.verdict(status="converged")


def gauge_cross_validation(state, config, gauge_time, interpolation="spectral"):
    """Reparametrized and primary runs on [0, gauge_time], every step sampled, compared after pull-back"""
    window = config.model_copy(update={
        "t_max": gauge_time,
        "monitor_stride": 1,
        "stationary_tol": None,
        "max_steps": None,
        "store_vectors": True,
    })
    reparametrized = advance(state, window.model_copy(update={"reparametrized": True}))
    primary = advance(state, window.model_copy(update={"reparametrized": False}))
    return gauge_reconstruct(reparametrized, interpolation=interpolation, reference=primary)


def symplectic_perturbation(grid, harmonic=0.0, exact=0.0):
    """omega~ + harmonic * e^13 + exact * d(sin(x1) e^3): a closed nondegenerate perturbation"""
    background = flat_background(grid)
    terms = []
    if harmonic:
        terms.append(PerturbationTerm(2, (1, 3), (0,) * 6, harmonic, "harmonic"))
    if exact:
        terms.append(PerturbationTerm(2, (3,), (1, 0, 0, 0, 0, 0), exact, "exact"))
    return background.omega_tilde + perturbation_field(grid, terms, 2)

