import logging
import math

import numpy as np
import pytest

from errors import ConfigError, DegenerateError, NotExactError, NotPositiveError
from forms6 import AltTensor, standard_omega, standard_phi
from lattice import (
    FormField,
    Grid,
    TensorField,
    christoffel,
    ck_norm,
    codifferential,
    curvature_proxy,
    dealias,
    exterior_derivative,
    green_inverse,
    harmonic_projection,
    hodge_laplacian,
    l2_inner,
    l2_norm,
    load_field,
    neumann_operator,
    nijenhuis,
    nijenhuis_norm,
    random_band_limited,
    require_positive,
    riemann_sup,
    save_field,
    sobolev_norm,
    structure_fields,
    trig_field,
)
from lattice.pointwise import pullback_field


@pytest.fixture
def line_grid():
    return Grid(8, shape=(8, 1, 1, 1, 1, 1))


@pytest.fixture
def box_grid():
    return Grid(8, shape=(8, 8, 4, 4, 1, 1))


def test_grid_validation(monkeypatch):
    with pytest.raises(ConfigError):
        Grid(6)
    with pytest.raises(ConfigError):
        Grid(2)
    with pytest.raises(ConfigError):
        Grid(8, shape=(8, 3, 1, 1, 1, 1))
    monkeypatch.setenv("IIA_MAX_POINTS", "100")
    with pytest.raises(ConfigError):
        Grid(4)


def test_grid_basics(box_grid):
    assert box_grid.size == 8 * 8 * 4 * 4
    assert box_grid.volume == pytest.approx((2 * math.pi) ** 6)
    assert box_grid.resolved_axes == (0, 1, 2, 3)
    assert box_grid.min_positive_symbol == pytest.approx(1.0)


def test_exterior_derivative_examples(line_grid):
    constant = FormField.constant(line_grid, standard_omega())
    assert exterior_derivative(constant).max_abs() < 1e-15

    field = trig_field(line_grid, AltTensor.basis(2), (1, 0, 0, 0, 0, 0))
    expected = trig_field(line_grid, AltTensor.basis(1, 2), (1, 0, 0, 0, 0, 0), kind="cos")
    assert np.allclose(exterior_derivative(field).values, expected.values, atol=1e-13)


def test_d_squared_vanishes(box_grid, rng):
    for degree in range(5):
        field = random_band_limited(box_grid, degree, rng)
        assert exterior_derivative(exterior_derivative(field)).max_abs() < 1e-13
    for degree in range(2, 7):
        field = random_band_limited(box_grid, degree, rng)
        assert codifferential(codifferential(field)).max_abs() < 1e-13


def test_codifferential_examples(line_grid):
    constant = FormField.constant(line_grid, AltTensor.basis(1, 3))
    assert codifferential(constant).max_abs() < 1e-15

    h = trig_field(line_grid, AltTensor(np.ones(1), 0), (1, 0, 0, 0, 0, 0))
    assert np.allclose(codifferential(exterior_derivative(h)).values, h.values, atol=1e-13)


def test_codifferential_is_adjoint(box_grid, rng):
    for degree in range(1, 6):
        f = random_band_limited(box_grid, degree - 1, rng)
        g = random_band_limited(box_grid, degree, rng)
        left = l2_inner(exterior_derivative(f), g)
        right = l2_inner(f, codifferential(g))
        assert left == pytest.approx(right, rel=1e-10, abs=1e-8)


def test_hodge_laplacian(line_grid, box_grid, rng):
    assert hodge_laplacian(FormField.constant(line_grid, standard_phi())).max_abs() < 1e-15
    field = trig_field(line_grid, AltTensor.basis(1, 3), (1, 0, 0, 0, 0, 0))
    assert np.allclose(hodge_laplacian(field).values, field.values, atol=1e-13)

    for degree in range(7):
        field = random_band_limited(box_grid, degree, rng)
        composed = FormField.zeros(box_grid, degree)
        if degree < 6:
            composed = composed + codifferential(exterior_derivative(field))
        if degree > 0:
            composed = composed + exterior_derivative(codifferential(field))
        assert np.allclose(hodge_laplacian(field).values, composed.values, atol=1e-12)
        assert l2_inner(hodge_laplacian(field), field) >= 0.0


def test_harmonic_projection(line_grid, box_grid, rng):
    constant = FormField.constant(line_grid, standard_omega())
    harmonic, remainder = harmonic_projection(constant)
    assert np.allclose(harmonic.constants, standard_omega().components)
    assert remainder.max_abs() < 1e-15

    wave = trig_field(line_grid, AltTensor.basis(1, 2), (1, 0, 0, 0, 0, 0))
    harmonic, remainder = harmonic_projection(wave)
    assert harmonic.max_abs() < 1e-15
    assert np.allclose(remainder.values, wave.values)

    field = random_band_limited(box_grid, 2, rng) + FormField.constant(box_grid, standard_omega())
    once, rest = harmonic_projection(field)
    twice, _ = harmonic_projection(once.to_field(box_grid))
    assert np.allclose(once.constants, twice.constants)
    assert np.allclose((once.to_field(box_grid) + rest).values, field.values)


def test_green_inverse(line_grid, box_grid, rng):
    wave = trig_field(line_grid, AltTensor.basis(1), (1, 0, 0, 0, 0, 0))
    assert np.allclose(green_inverse(wave).values, wave.values, atol=1e-13)
    assert green_inverse(FormField.constant(line_grid, AltTensor.basis(1))).max_abs() < 1e-15

    field = random_band_limited(box_grid, 3, rng)
    _, remainder = harmonic_projection(field)
    assert np.allclose(hodge_laplacian(green_inverse(field)).values, remainder.values, atol=1e-11)


def test_neumann_operator(line_grid, box_grid, rng):
    potential = trig_field(line_grid, AltTensor.basis(2), (1, 0, 0, 0, 0, 0))
    exact = exterior_derivative(potential)
    gamma = neumann_operator(exact)
    assert np.allclose(exterior_derivative(gamma).values, exact.values, atol=1e-11)

    assert neumann_operator(FormField.zeros(line_grid, 2)).max_abs() == 0.0
    with pytest.raises(NotExactError):
        neumann_operator(FormField.constant(line_grid, AltTensor.basis(1, 2)))

    not_closed = trig_field(box_grid, AltTensor.basis(1, 2), (0, 0, 1, 0, 0, 0))
    with pytest.raises(NotExactError):
        neumann_operator(not_closed)

    # closed fields split into harmonic part plus d of the Neumann potential
    closed = exterior_derivative(random_band_limited(box_grid, 2, rng)) + FormField.constant(
        box_grid, standard_phi()
    )
    harmonic, remainder = harmonic_projection(closed)
    rebuilt = harmonic.to_field(box_grid) + exterior_derivative(neumann_operator(remainder))
    assert np.allclose(rebuilt.values, closed.values, atol=1e-10)


def test_sobolev_norm(line_grid, box_grid, rng):
    constant = FormField.constant(line_grid, 3.0 * AltTensor.basis(1))
    for order in (0, 1, 4):
        assert sobolev_norm(constant, order) == pytest.approx(3.0 * math.sqrt(line_grid.volume))

    wave = trig_field(line_grid, AltTensor.basis(1), (1, 0, 0, 0, 0, 0))
    assert sobolev_norm(wave, 1) / sobolev_norm(wave, 0) == pytest.approx(math.sqrt(2.0))
    assert sobolev_norm(wave, 0) == pytest.approx(l2_norm(wave))

    for order in range(0, 11, 2):
        f, g = random_band_limited(box_grid, 2, rng), random_band_limited(box_grid, 2, rng)
        assert sobolev_norm(f + g, order) <= sobolev_norm(f, order) + sobolev_norm(g, order) + 1e-9
        assert sobolev_norm(2.5 * f, order) == pytest.approx(2.5 * sobolev_norm(f, order))
        assert sobolev_norm(f, order + 1) >= sobolev_norm(f, order)


def test_ck_norm_and_dealias(line_grid, caplog):
    wave = trig_field(line_grid, AltTensor.basis(1), (1, 0, 0, 0, 0, 0))
    assert ck_norm(wave, 2) == pytest.approx(1.0)

    kept = trig_field(line_grid, AltTensor.basis(1), (2, 0, 0, 0, 0, 0))
    dropped = trig_field(line_grid, AltTensor.basis(1), (3, 0, 0, 0, 0, 0))
    assert np.allclose(dealias(kept).values, kept.values)
    assert dealias(dropped).max_abs() < 1e-14

    with caplog.at_level(logging.WARNING, logger="lattice.spectral"):
        exterior_derivative(dropped)
    assert any("top third" in record.getMessage() for record in caplog.records)


def test_christoffel_constant_and_indefinite(line_grid):
    assert christoffel(TensorField.constant(line_grid, 2.0 * np.eye(6))).max_abs() < 1e-15
    with pytest.raises(NotPositiveError):
        christoffel(TensorField.constant(line_grid, np.diag([-1.0, 1, 1, 1, 1, 1])))


def test_christoffel_conformal_metric():
    grid = Grid(16, shape=(16, 1, 1, 1, 1, 1))
    eps = 0.1
    x1 = np.broadcast_to(grid.coordinates(0), grid.shape)
    u = eps * np.sin(x1)
    du = eps * np.cos(x1)
    metric = TensorField(grid, np.exp(2 * u)[None, None] * np.eye(6).reshape(6, 6, *(1,) * 6), 2)
    gamma = christoffel(metric).values

    expected = np.zeros_like(gamma)
    for k in range(6):
        expected[k, 0, k] += du
        expected[k, k, 0] += du
    for p in range(6):
        expected[0, p, p] -= du
    assert np.allclose(gamma, expected, atol=1e-8)
    assert np.allclose(gamma, np.swapaxes(gamma, 1, 2))
    assert riemann_sup(metric) > 1e-3
    assert curvature_proxy(metric) > 1e-3


def _standard_j():
    j = np.zeros((6, 6))
    for block in range(0, 6, 2):
        j[block + 1, block] = 1.0
        j[block, block + 1] = -1.0
    return j


def test_nijenhuis_constant_and_pulled_back():
    grid = Grid(8, shape=(1, 8, 1, 1, 1, 1))
    j0 = _standard_j()
    assert nijenhuis_norm(TensorField.constant(grid, j0)) < 1e-14

    # J pulled back by the diffeomorphism x -> x + eps sin(x2) e1 stays integrable
    eps = 0.2
    x2 = np.broadcast_to(grid.coordinates(1), grid.shape)
    jacobian = np.broadcast_to(np.eye(6).reshape(6, 6, *(1,) * 6), (6, 6) + grid.shape).copy()
    jacobian[0, 1] = eps * np.cos(x2)
    inverse = jacobian.copy()
    inverse[0, 1] = -jacobian[0, 1]
    pulled = np.einsum("ab...,bc,cd...->ad...", inverse, j0, jacobian)
    assert nijenhuis_norm(TensorField(grid, pulled, 2)) < 1e-8


def test_nijenhuis_detects_non_integrable():
    grid = Grid(8, shape=(8, 1, 1, 1, 1, 1))
    j0 = _standard_j()
    x1 = np.broadcast_to(grid.coordinates(0), grid.shape)

    def conjugated(eps):
        scale = eps * np.sin(x1)
        a = np.broadcast_to(np.eye(6).reshape(6, 6, *(1,) * 6), (6, 6) + grid.shape).copy()
        a_inv = a.copy()
        a[2, 2], a[3, 3] = np.exp(scale), np.exp(-scale)
        a_inv[2, 2], a_inv[3, 3] = np.exp(-scale), np.exp(scale)
        return TensorField(grid, np.einsum("ab...,bc,cd...->ad...", a_inv, j0, a), 2)

    large, small = nijenhuis(conjugated(1e-3)).max_abs(), nijenhuis(conjugated(5e-4)).max_abs()
    assert large > 1e-4
    assert large / small == pytest.approx(2.0, rel=0.05)


def test_snapshot_round_trip(box_grid, rng, tmp_path):
    field = random_band_limited(box_grid, 3, rng)
    path = tmp_path / "phi.bin"
    save_field(path, field)
    loaded = load_field(path)
    assert loaded.grid == box_grid
    assert loaded.degree == 3
    assert np.array_equal(loaded.values, field.values)

    (tmp_path / "junk.bin").write_bytes(b"nope")
    with pytest.raises(ConfigError):
        load_field(tmp_path / "junk.bin")


def test_structure_fields(box_grid):
    phi = FormField.constant(box_grid, standard_phi())
    omega = FormField.constant(box_grid, standard_omega())
    structure = structure_fields(phi, omega)
    assert structure.positive.all()
    assert np.allclose(structure.normsq, 1.0)
    assert np.allclose(structure.metric.values, np.eye(6).reshape(6, 6, *(1,) * 6))
    assert structure.first_failure() is None

    broken = FormField.constant(box_grid, AltTensor.basis(1, 2, 3))
    with pytest.raises(DegenerateError) as info:
        require_positive(broken, omega, time=0.5)
    assert info.value.location == (0, 0, 0, 0, 0, 0)
    assert info.value.time == 0.5


def test_pullback_field_matches_pointwise(box_grid):
    phi = FormField.constant(box_grid, standard_phi())
    swap = np.eye(6)[[1, 0, 2, 3, 4, 5]]
    pulled = pullback_field(phi, TensorField.constant(box_grid, swap))
    expected = FormField.constant(box_grid, AltTensor.from_dict(
        {(2, 3, 5): 0.5, (2, 4, 6): -0.5, (1, 4, 5): -0.5, (1, 3, 6): -0.5}
    ))
    assert np.allclose(pulled.values, expected.values)
