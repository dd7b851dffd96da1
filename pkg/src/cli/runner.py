"""
ExperimentRunner - Executes one command of the laboratory and writes its artifacts.
Follows Single Responsibility Principle - only dispatches commands and maps failures to exit codes.
"""
import logging

from cli.check_suite import CHECK_COLUMNS, format_table, run_suites
from cli.reports import ReportWriter, now
from errors import (
    ConfigError,
    ConstraintError,
    DegenerateError,
    IIAError,
    InvariantSuiteError,
    NotPositiveError,
    OrientationError,
    PrimitivityError,
)
from flow import TypeIIAState, advance, read_trajectory, write_trajectory
from stability import (
    StageManager,
    StageTimer,
    constrained_variation,
    decay_run,
    decay_state,
    end_to_end_stability,
    energies,
    flat_background,
    harmonic_correction,
    linearization_check,
    order_of_accuracy,
    perturbation_field,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0

# Relative error allowed between finite differences and the linearized operator
LINEARIZATION_TOLERANCE = 1e-4

LINEARIZATION_COLUMNS = ["seed", "eps", "error_phi", "error_omega", "error", "absolute", "h_norm"]


class ExperimentRunner:
    """Runs a validated RunConfig: one command, one output directory, one exit status."""

    def __init__(self, config, stream=print):
        self.config = config
        self.stream = stream
        self.writer = ReportWriter(config.out)
        self.stage_timer = StageTimer()
        self.manager = StageManager(self.stage_timer)
        self.commands = {
            "check": self._run_check,
            "flow-run": self._run_flow,
            "linearize": self._run_linearize,
            "perturb-and-flow": self._run_perturb_and_flow,
            "decay-report": self._run_decay_report,
        }

    def _base_verdict(self):
        return {"command": self.config.command, "seed": self.config.seed, "config": self.config.summary()}

    @staticmethod
    def _checked(build, *args):
        """Initial data from build(*args); structure failures become configuration errors"""
        try:
            return build(*args)
        except (NotPositiveError, OrientationError, PrimitivityError, ConstraintError, DegenerateError) as exc:
            raise ConfigError(f"initial data is not a Type IIA structure: {exc}") from exc

    def _initial_state(self):
        """Flat background plus the manifest's perturbation terms"""
        grid = self.config.grid()
        background = flat_background(grid, self.config.background.scale)
        terms = self.config.perturbation
        state = TypeIIAState(
            background.phi_tilde + perturbation_field(grid, terms, 3),
            background.omega_tilde + perturbation_field(grid, terms, 2),
        )
        self._checked(state.validate)
        return state

    def _run_check(self):
        grid = self.config.grid()
        experiment = self.config.experiment
        self.stage_timer.start_stage_timer("check")
        try:
            checks = run_suites(grid, experiment.samples, self.config.seed)
            failure = None
        except InvariantSuiteError as exc:
            checks, failure = exc.checks, exc
        self.stage_timer.end_stage_timer()

        self.stream(format_table(checks))
        self.writer.write_csv("checks.csv", CHECK_COLUMNS, [check.row() for check in checks])
        verdict = self._base_verdict()
        verdict.update({
            "status": "pass" if failure is None else "fail",
            "failed": [check.name for check in checks if not check.passed],
        })
        self.writer.write_verdict(verdict)
        if failure is not None:
            raise failure
        return verdict

    def _run_flow(self):
        state = self._initial_state()
        self.stage_timer.start_stage_timer("flow")
        try:
            trajectory = advance(state, self.config.flow)
        except IIAError as exc:
            partial = getattr(exc, "trajectory", None)
            if partial is not None:
                self.writer.write_monitor(partial.monitor)
            raise
        finally:
            self.stage_timer.end_stage_timer()

        self.writer.write_monitor(trajectory.monitor)
        write_trajectory(self.config.out / "trajectory", trajectory)
        last = trajectory.monitor.last()
        verdict = self._base_verdict()
        verdict.update({
            "status": trajectory.stop_reason,
            "steps": trajectory.steps,
            "final_time": trajectory.final_state().time,
            "final_rhs_l2": last.rhs_l2,
            "max_primitivity": max(trajectory.monitor.series("primitivity_max")),
            "max_h_drift": max(trajectory.monitor.series("h_drift")),
        })
        self.writer.write_verdict(verdict)
        return verdict

    def _run_linearize(self):
        grid = self.config.grid()
        experiment = self.config.experiment
        rows, ratios = [], {}
        self.stage_timer.start_stage_timer("linearize")
        for seed in self.config.seeds():
            variation = constrained_variation(grid, seed, experiment.mode_budget)
            for eps in experiment.eps:
                report = linearization_check(variation, eps)
                rows.append([seed] + report.as_row())
            _, _, ratios[seed] = order_of_accuracy(variation, max(experiment.eps))
        self.stage_timer.end_stage_timer()

        self.writer.write_csv("linearization.csv", LINEARIZATION_COLUMNS, rows)
        worst = max(row[4] for row in rows)
        verdict = self._base_verdict()
        verdict.update({
            "status": "pass" if worst <= LINEARIZATION_TOLERANCE else "fail",
            "max_error": worst,
            "order_ratios": {str(seed): ratio for seed, ratio in ratios.items()},
        })
        self.writer.write_verdict(verdict)
        if worst > LINEARIZATION_TOLERANCE:
            raise InvariantSuiteError("linearization error above tolerance", error=worst, limit=LINEARIZATION_TOLERANCE)
        return verdict

    def _run_perturb_and_flow(self):
        grid = self.config.grid()
        experiment = self.config.experiment
        omega = flat_background(grid, self.config.background.scale).omega_tilde
        omega = omega + perturbation_field(grid, self.config.perturbation, 2)
        try:
            verdict = end_to_end_stability(
                omega,
                self.config.flow,
                basin_epsilon=experiment.basin_epsilon,
                basin_order=experiment.basin_order,
                s_steps=experiment.s_steps,
                cross_validate=experiment.cross_validate,
                gauge_time=experiment.gauge_time,
                interpolation=experiment.interpolation,
                k_max=experiment.k_max,
                manager=self.manager,
            )
        except IIAError as exc:
            partial = self._base_verdict()
            partial.update(getattr(exc, "verdict", {"status": type(exc).__name__, "error": str(exc)}))
            self.writer.write_verdict(partial)
            raise
        full = self._base_verdict()
        full.update(verdict)
        self.writer.write_verdict(full)
        return full

    def _run_decay_report(self):
        experiment = self.config.experiment
        self.stage_timer.start_stage_timer("decay")
        if experiment.trajectory is not None:
            trajectory = read_trajectory(experiment.trajectory)
            initial = trajectory.initial_state()
            corrected = harmonic_correction(initial.phi, initial.omega)
            report = energies(trajectory, corrected, experiment.k_max)
        else:
            grid = self.config.grid()
            bump = perturbation_field(grid, self.config.perturbation, 3)
            perturbation = bump if self.config.perturbation else None
            state = self._checked(decay_state, grid, experiment.amplitude, perturbation)
            trajectory, corrected, report = decay_run(grid, experiment.amplitude, self.config.flow, experiment.k_max, state=state)
        self.stage_timer.end_stage_timer()

        self.writer.write_energies(report)
        self.writer.write_monitor(trajectory.monitor)
        verdict = self._base_verdict()
        verdict.update(report.summary())
        verdict.update({
            "status": "decaying" if report.fitted_delta is not None else "no fit",
            "min_positive_symbol": trajectory.grid.min_positive_symbol,
            "expected_delta": 2.0 * corrected.point().normsq * trajectory.grid.min_positive_symbol,
        })
        self.writer.write_verdict(verdict)
        return verdict

    def run(self):
        """Run the command; returns the process exit status"""
        started = now()
        status = "ok"
        try:
            self.commands[self.config.command]()
            return EXIT_OK
        except IIAError as exc:
            status = type(exc).__name__
            logger.error("%s failed: %s", self.config.command, exc)
            return exc.exit_code
        finally:
            self.writer.write_metadata(self.config, self.stage_timer, started, status)


def run(config):
    """Exit status of one validated run"""
    return ExperimentRunner(config).run()
