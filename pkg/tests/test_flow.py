import math

import numpy as np
import pytest
from pydantic import ValidationError

from errors import DegenerateError, StepUnderflowError
from flow import (
    FlowConfig,
    FlowIntegrator,
    Trajectory,
    TrajectorySample,
    TypeIIAState,
    advance,
    deturck_ricci_vector,
    deturck_vector,
    gauge_reconstruct,
    read_trajectory,
    rhs_primary,
    rhs_reparametrized,
    soliton_residual,
    stationarity_report,
    write_trajectory,
)
from flow.gauge import Interpolator
from flow.rhs import metric_contraction
from flow.state import Monitor
from forms6 import AltTensor, normal_form, sp6_randomize, standard_omega
from forms6.multi_index import position
from lattice import FormField, Grid, TensorField, christoffel, exterior_derivative, hodge_laplacian, l2_norm
from lattice.geometry import require_positive_metric
from lattice.pointwise import trig_field


@pytest.fixture
def line_grid():
    return Grid(8, shape=(8, 1, 1, 1, 1, 1))


@pytest.fixture
def box_grid():
    return Grid(8, shape=(8, 8, 4, 4, 1, 1))


def mode_form():
    return AltTensor.basis(1, 3, 5) - AltTensor.basis(1, 4, 6)


def perturbed_state(grid, amplitude):
    """Flat structure plus amplitude * cos(x1)(e135 - e146), closed, exact and primitive"""
    standard = TypeIIAState.standard(grid)
    bump = trig_field(grid, mode_form(), (1, 0, 0, 0, 0, 0), amplitude, kind="cos")
    return standard.with_fields(standard.phi + bump, standard.omega), bump


def test_flat_state_is_stationary(box_grid):
    state = TypeIIAState.standard(box_grid)
    assert rhs_primary(state).max_abs() < 1e-13
    assert deturck_vector(state).max_abs() < 1e-13
    dphi, domega = rhs_reparametrized(state)
    assert dphi.max_abs() < 1e-13
    assert domega.max_abs() < 1e-13


def test_constant_symplectic_pullback_is_stationary(box_grid):
    structure = sp6_randomize(normal_form(), seed=3)
    state = TypeIIAState(FormField.constant(box_grid, structure.phi), FormField.constant(box_grid, structure.omega))
    assert rhs_primary(state).max_abs() < 1e-13
    assert deturck_vector(state).max_abs() < 1e-13


def test_harmonic_shift_has_no_derivative_terms(line_grid):
    shift = 1e-2 * (AltTensor.basis(1, 3, 6) + AltTensor.basis(1, 4, 5))
    standard = TypeIIAState.standard(line_grid)
    state = standard.with_fields(standard.phi + FormField.constant(line_grid, shift), standard.omega)
    assert deturck_vector(state).max_abs() < 1e-13
    assert rhs_primary(state).max_abs() < 1e-13


def test_outputs_are_exact(box_grid):
    state, _ = perturbed_state(box_grid, 1e-2)
    dphi, domega = rhs_reparametrized(state)
    assert exterior_derivative(dphi).max_abs() < 1e-12
    assert exterior_derivative(domega).max_abs() < 1e-12
    assert dphi.mean().max_abs() < 1e-12
    assert domega.mean().max_abs() < 1e-12
    assert exterior_derivative(rhs_primary(state)).max_abs() < 1e-12


def test_linearization_is_minus_laplacian(line_grid):
    eps = 1e-4
    _, bump = perturbed_state(line_grid, 1.0)
    standard = TypeIIAState.standard(line_grid)
    plus = standard.with_fields(standard.phi + eps * bump, standard.omega)
    minus = standard.with_fields(standard.phi - eps * bump, standard.omega)
    derivative = (rhs_reparametrized(plus)[0] - rhs_reparametrized(minus)[0]) / (2 * eps)
    expected = -hodge_laplacian(bump)
    assert l2_norm(derivative - expected) <= 1e-5 * l2_norm(expected)


def test_metric_contraction_matches_christoffel(box_grid):
    x1, x2 = box_grid.coordinates(0), box_grid.coordinates(1)
    conformal = np.broadcast_to(1.0 + 0.1 * np.sin(x1) + 0.05 * np.cos(x2), box_grid.shape)
    metric = TensorField(box_grid, np.eye(6).reshape(6, 6, *([1] * 6)) * conformal[None, None], 2)
    inverse_metric = require_positive_metric(metric)
    expected = np.einsum("pq...,kpq...->k...", inverse_metric.values, christoffel(metric).values)
    assert np.allclose(metric_contraction(metric, inverse_metric).values, expected, atol=1e-10)


def test_deturck_ricci_vector_vanishes_on_flat_state(box_grid):
    assert deturck_ricci_vector(TypeIIAState.standard(box_grid)).max_abs() < 1e-13


def test_soliton_residuals(line_grid):
    state = TypeIIAState.standard(line_grid)
    assert max(soliton_residual(state, np.zeros(6))) < 1e-13
    assert max(soliton_residual(state, [0.3, -1.0, 0.0, 2.0, 0.5, 0.0])) < 1e-12
    wave = np.zeros((6,) + line_grid.shape)
    wave[0] = np.broadcast_to(np.sin(line_grid.coordinates(0)), line_grid.shape)
    _, second = soliton_residual(state, TensorField(line_grid, wave, 1))
    assert second > 1e-3


def test_stationarity_report_flat(line_grid):
    report = stationarity_report(TypeIIAState.standard(line_grid))
    assert report["rhs_l2"] < 1e-12
    assert report["deturck_l2"] < 1e-13
    assert report["normsq_oscillation"] < 1e-14
    assert report["nijenhuis"] < 1e-12


def test_flow_config_validation():
    with pytest.raises(ValidationError):
        FlowConfig(dt_safety=1.5)
    with pytest.raises(ValidationError):
        FlowConfig(monitor_stride=0)
    with pytest.raises(ValidationError):
        FlowConfig(stepper="euler")
    assert FlowConfig.from_preset("decay").t_max == 12.0


def test_flat_flow_stops_stationary(line_grid):
    trajectory = advance(TypeIIAState.standard(line_grid), FlowConfig())
    assert trajectory.stop_reason == "stationary"
    assert len(trajectory) == 1
    assert trajectory.monitor.last().rhs_l2 <= 1e-12


def test_flat_flow_does_not_drift(line_grid):
    state = TypeIIAState.standard(line_grid)
    config = FlowConfig(t_max=1e6, stationary_tol=None, max_steps=1000, monitor_stride=100)
    trajectory = advance(state, config)
    assert trajectory.stop_reason == "max_steps"
    assert trajectory.steps == 1000
    assert len(trajectory) == 11
    final = trajectory.final_state()
    assert (final.phi - state.phi).max_abs() <= 1e-11
    assert (final.omega - state.omega).max_abs() <= 1e-11
    monitor = trajectory.monitor
    for name in monitor.columns():
        if name == "t":
            continue
        series = monitor.series(name)
        assert np.max(np.abs(series - series[0])) <= 1e-11, name
    assert np.all(monitor.series("rhs_l2") <= 1e-12)


def test_small_perturbation_decays(line_grid):
    state, _ = perturbed_state(line_grid, 1e-3)
    trajectory = advance(state, FlowConfig(t_max=1.0, monitor_stride=1, stationary_tol=None))
    monitor = trajectory.monitor
    rhs = monitor.series("rhs_l2")
    times = monitor.series("t")
    assert trajectory.stop_reason == "t_max"
    assert times[-1] == pytest.approx(1.0)
    assert np.all(np.diff(rhs) < 0)
    # single mode with Laplacian eigenvalue 1 and |phi|^2 = 1
    assert rhs[-1] / rhs[0] == pytest.approx(math.exp(-1.0), rel=1e-2)
    assert np.max(monitor.series("h_drift")) <= 1e-9
    assert np.max(monitor.series("dphi_l2")) <= 1e-10
    assert np.max(monitor.series("primitivity_max")) <= 1e-8


def test_primary_flow_keeps_omega(line_grid):
    state, _ = perturbed_state(line_grid, 1e-2)
    trajectory = advance(state, FlowConfig(t_max=0.3, reparametrized=False, stationary_tol=None))
    assert np.array_equal(trajectory.final_state().omega.values, state.omega.values)
    assert trajectory.final_state().time == pytest.approx(0.3)


def test_integrator_steps(line_grid):
    state, _ = perturbed_state(line_grid, 1e-3)
    integrator = FlowIntegrator(state, FlowConfig(t_max=0.5, monitor_stride=2, stationary_tol=None))
    integrator.start_flow()
    assert not integrator.is_complete()
    assert integrator.step_flow()
    assert integrator.get_current_state().time > 0.0
    trajectory = integrator.run_to_completion()
    assert integrator.is_complete()
    assert integrator.get_stop_reason() == "t_max"
    assert trajectory.times[-1] == pytest.approx(0.5)
    assert not integrator.step_flow()


def test_huge_perturbation_degenerates(line_grid):
    state, _ = perturbed_state(line_grid, 0.8)
    with pytest.raises(DegenerateError) as info:
        advance(state, FlowConfig())
    assert info.value.location is not None
    assert info.value.time == 0.0
    assert info.value.trajectory is not None
    assert info.value.exit_code == 4


def test_step_underflow(line_grid):
    state, _ = perturbed_state(line_grid, 1e-3)
    with pytest.raises(StepUnderflowError) as info:
        advance(state, FlowConfig(t_max=10.0, min_dt=1.0, stationary_tol=None))
    assert len(info.value.trajectory) == 1


def test_trajectory_round_trip(line_grid, tmp_path):
    state, _ = perturbed_state(line_grid, 1e-3)
    trajectory = advance(state, FlowConfig(t_max=0.4, monitor_stride=1, stationary_tol=None))
    write_trajectory(tmp_path / "run", trajectory)
    loaded = read_trajectory(tmp_path / "run")
    assert loaded.times == trajectory.times
    assert loaded.stop_reason == trajectory.stop_reason
    assert loaded.monitor.rows() == trajectory.monitor.rows()
    assert np.array_equal(loaded.samples[-1].phi.values, trajectory.samples[-1].phi.values)
    assert np.array_equal(loaded.samples[-1].vector.values, trajectory.samples[-1].vector.values)
    header = (tmp_path / "run" / "monitor.csv").read_text().splitlines()[0]
    assert header.startswith("t,rhs_l2,dphi_l2,primitivity_max,sup_phi,curv_proxy,min_g_eig,h_drift")


def synthetic_trajectory(grid, phi_values, speed):
    """Two samples with a constant DeTurck field speed * e_1"""
    vector = TensorField.constant(grid, speed * np.eye(6)[0])
    omega = FormField.constant(grid, standard_omega())
    samples = [
        TrajectorySample(0.0, FormField(grid, phi_values, 3), omega, vector),
        TrajectorySample(1.0, FormField(grid, phi_values, 3), omega, vector),
    ]
    return Trajectory(samples, Monitor(), FlowConfig())


def test_gauge_identity_for_zero_field(line_grid):
    state, _ = perturbed_state(line_grid, 1e-2)
    trajectory = synthetic_trajectory(line_grid, state.phi.values, 0.0)
    result = gauge_reconstruct(trajectory)
    assert np.allclose(result.phi[-1].values, state.phi.values, atol=1e-14, rtol=0)
    assert result.omega_error < 1e-14


def test_gauge_constant_field_is_translation(line_grid):
    state, _ = perturbed_state(line_grid, 1e-1)
    spacing = line_grid.spacing[0]
    result = gauge_reconstruct(synthetic_trajectory(line_grid, state.phi.values, spacing))
    expected = np.roll(state.phi.values, 1, axis=1)
    assert np.allclose(result.phi[-1].values, expected, atol=1e-12)
    assert np.allclose(result.displacement[-1].values[0], -spacing)


def test_gauge_cubic_shift():
    grid = Grid(16, shape=(16, 1, 1, 1, 1, 1))
    shift = 0.3 * grid.spacing[0]
    bump = trig_field(grid, mode_form(), (1, 0, 0, 0, 0, 0), 1.0, kind="cos")
    result = gauge_reconstruct(synthetic_trajectory(grid, bump.values, shift), interpolation="cubic")
    x1 = np.broadcast_to(grid.coordinates(0), grid.shape)
    assert np.allclose(result.phi[-1].component(1, 3, 5), np.cos(x1 - shift), atol=1e-3)


def test_spectral_interpolator_is_exact_for_band_limited_fields(line_grid):
    bump = trig_field(line_grid, mode_form(), (1, 0, 0, 0, 0, 0), 1.0, kind="sin")
    positions = np.zeros((6, 3))
    positions[0] = [0.1, 1.7, 5.9]
    sampled = Interpolator(line_grid, "spectral")(bump.values, positions)
    e135 = position(3)[(0, 2, 4)]
    assert np.allclose(sampled[e135], np.sin(positions[0]), atol=1e-12)


def test_gauge_reconstruction_matches_primary_flow(line_grid):
    state, _ = perturbed_state(line_grid, 1e-2)
    reparametrized = advance(state, FlowConfig(t_max=0.5, monitor_stride=1, stationary_tol=None))
    primary = advance(state, FlowConfig(t_max=0.5, monitor_stride=1, stationary_tol=None, reparametrized=False))
    result = gauge_reconstruct(reparametrized, interpolation="spectral", reference=primary)
    assert result.reference_time == pytest.approx(0.5)
    assert result.discrepancy <= 1e-4
    assert result.omega_error <= 1e-4
