import numpy as np
import pytest

from errors import DegenerateError, NotPositiveError, OrientationError, PrimitivityError
from forms6 import (
    AcStructure,
    AltTensor,
    Metric6,
    PointStructure,
    almost_complex,
    bilinear_residual,
    contraction_residual,
    hitchin_dual,
    hitchin_invariants,
    hodge_star,
    inner_product,
    interior_product,
    j_action,
    lambda_contraction,
    lefschetz_invert,
    metric,
    norm_squared,
    normal_form,
    point_structure,
    random_structure,
    sp6_randomize,
    standard_omega,
    standard_phi,
    standard_phihat,
    symplectic_pullback,
    type_decompose,
    variation_dual,
    variation_norm_squared,
    volume_residual,
    wedge,
)
from forms6 import kernels
from forms6.multi_index import DIM, compress, dimension, full_tensor


def random_form(rng, degree):
    return AltTensor(rng.normal(size=dimension(degree)), degree)


@pytest.fixture
def randomized_structures():
    return [sp6_randomize(normal_form(), seed) for seed in range(25)]


@pytest.fixture
def general_structures():
    return [random_structure(seed) for seed in range(25)]


def test_full_tensor_round_trip(rng):
    for degree in range(DIM + 1):
        a = random_form(rng, degree)
        full = a.full()
        assert np.allclose(compress(full, degree), a.components)
        if degree >= 2:
            assert np.allclose(full, -np.swapaxes(full, 0, 1))


def test_basis_labels_pick_up_sign():
    assert np.allclose(AltTensor.basis(2, 1).components, -AltTensor.basis(1, 2).components)
    assert AltTensor.basis(1, 1).max_abs() == 0.0
    with pytest.raises(ValueError):
        AltTensor(np.zeros(4), 2)


def test_wedge_basics():
    e12 = wedge(AltTensor.basis(1), AltTensor.basis(2))
    assert np.allclose(e12.components, AltTensor.basis(1, 2).components)

    omega = standard_omega()
    cube = wedge(wedge(omega, omega), omega)
    assert np.allclose(cube.components, [6.0])

    assert wedge(standard_phi(), omega).max_abs() < 1e-15

    with pytest.raises(ValueError):
        wedge(standard_phi(), AltTensor.basis(1, 2, 3, 4))


def test_wedge_graded_commutativity(rng):
    for p, q in [(1, 1), (1, 2), (2, 2), (3, 2), (3, 3), (1, 3)]:
        a, b = random_form(rng, p), random_form(rng, q)
        assert np.allclose(wedge(a, b).components, (-1) ** (p * q) * wedge(b, a).components)


def test_interior_product_basics():
    e1 = np.eye(DIM)[0]
    assert np.allclose(interior_product(e1, AltTensor.basis(1, 2)).components, AltTensor.basis(2).components)
    assert np.allclose(interior_product(e1, standard_omega()).components, AltTensor.basis(2).components)


def test_hitchin_invariants():
    lam, k_matrix = hitchin_invariants(standard_phi())
    assert lam == pytest.approx(-1.0 / 16.0, abs=1e-15)
    assert np.allclose(k_matrix @ k_matrix, -np.eye(DIM) / 16.0)

    lam_doubled, _ = hitchin_invariants(2.0 * standard_phi())
    assert lam_doubled == pytest.approx(16.0 * lam)

    lam_decomposable, _ = hitchin_invariants(AltTensor.basis(1, 2, 3))
    assert lam_decomposable == pytest.approx(0.0, abs=1e-15)


def test_almost_complex_normal_form():
    j = almost_complex(standard_phi())
    assert np.allclose(j.matrix, AcStructure.standard().matrix, atol=1e-15)
    assert np.allclose(almost_complex(3.0 * standard_phi()).matrix, j.matrix)
    # K is quadratic in phi, so the sign of phi does not reach J
    assert np.allclose(almost_complex(-standard_phi()).matrix, j.matrix)

    with pytest.raises(NotPositiveError):
        almost_complex(AltTensor.basis(1, 2, 3))


def test_hitchin_dual():
    assert np.allclose(hitchin_dual(standard_phi()).components, standard_phihat().components)
    assert np.allclose(hitchin_dual(2.5 * standard_phi()).components, 2.5 * standard_phihat().components)
    assert np.allclose(hitchin_dual(hitchin_dual(standard_phi())).components, -standard_phi().components)


def test_metric_examples():
    assert np.allclose(metric(standard_phi(), standard_omega()).entries, np.eye(DIM))
    assert np.allclose(metric(4.0 * standard_phi(), standard_omega()).entries, np.eye(DIM))

    doubled = point_structure(standard_phi(), 2.0 * standard_omega())
    assert np.allclose(doubled.metric.entries, 2.0 * np.eye(DIM))
    assert np.allclose(kernels.metric_from_j(doubled.omega.components, doubled.j.matrix), 2.0 * np.eye(DIM))

    broken = standard_omega() + 0.5 * AltTensor.basis(1, 3)
    with pytest.raises(PrimitivityError):
        metric(standard_phi(), broken)


def test_norm_squared_examples():
    assert norm_squared(standard_phi(), standard_omega()) == pytest.approx(1.0)
    assert norm_squared(3.0 * standard_phi(), standard_omega()) == pytest.approx(9.0)
    with pytest.raises(OrientationError):
        norm_squared(standard_phi(), -standard_omega())


def test_norm_squared_matches_inner_product(randomized_structures):
    for ps in randomized_structures:
        assert norm_squared(ps.phi, ps.omega) == pytest.approx(inner_product(ps.metric, ps.phi, ps.phi), rel=1e-12)


def test_lambda_contraction_examples():
    omega = standard_omega()
    assert lambda_contraction(omega, omega).components[0] == pytest.approx(3.0)
    assert lambda_contraction(omega, standard_phi()).max_abs() < 1e-15
    assert lambda_contraction(omega, AltTensor.basis(1, 2)).components[0] == pytest.approx(1.0)


def test_hodge_star_examples():
    identity = Metric6.identity()
    assert np.allclose(hodge_star(identity, AltTensor.basis(1, 2, 3, 4)).components, AltTensor.basis(5, 6).components)
    omega = standard_omega()
    assert np.allclose(hodge_star(identity, omega).components, 0.5 * wedge(omega, omega).components)
    assert np.allclose(hodge_star(identity, standard_phi()).components, standard_phihat().components)

    with pytest.raises(NotPositiveError):
        hodge_star(Metric6(np.diag([1.0, 1.0, 1.0, 1.0, 1.0, -1.0])), omega)


def test_hodge_star_properties(general_structures, rng):
    for ps in general_structures[:8]:
        g = ps.metric
        volume = np.sqrt(np.linalg.det(g.entries))
        for degree in range(DIM + 1):
            a = random_form(rng, degree)
            star = hodge_star(g, a)
            twice = hodge_star(g, star)
            assert np.allclose(twice.components, (-1) ** (degree * (DIM - degree)) * a.components)
            top = wedge(a, star).components[0]
            assert top == pytest.approx(inner_product(g, a, a) * volume, rel=1e-10)


def test_j_action_examples():
    j = AcStructure.standard()
    assert np.allclose(j_action(j, standard_omega()).components, standard_omega().components)
    assert np.allclose(j_action(j, standard_phi()).components, standard_phihat().components)
    assert np.allclose(j_action(j, AltTensor.basis(1)).components, -AltTensor.basis(2).components)


def test_j_action_squares_to_sign(general_structures, rng):
    for ps in general_structures[:5]:
        for degree in range(DIM + 1):
            a = random_form(rng, degree)
            twice = j_action(ps.j, j_action(ps.j, a))
            assert np.allclose(twice.components, (-1) ** degree * a.components)


def test_point_structure_invariants(general_structures):
    for ps in general_structures:
        j = ps.j.matrix
        g = ps.metric.entries
        assert ps.j.square_residual() < 1e-12 * max(1.0, np.abs(j).max() ** 2)
        assert np.allclose(kernels.metric_from_j(ps.omega.components, j), g, atol=1e-11)
        assert np.allclose(j.T @ g, ps.omega.full(), atol=1e-11)
        assert np.allclose(j.T @ g @ j, g, atol=1e-11)
        turned = np.einsum("ai,ajk->ijk", j, ps.phi.full())
        assert np.allclose(turned, -ps.phihat.full(), atol=1e-11)
        volume = wedge(ps.phi, ps.phihat).components[0]
        assert volume == pytest.approx(ps.normsq * kernels.pfaffian(ps.omega.components), rel=1e-12)
        assert volume_residual(ps) < 1e-10


def test_bilinear_identity(randomized_structures, general_structures):
    assert bilinear_residual(normal_form()) < 1e-14
    for ps in randomized_structures:
        assert bilinear_residual(ps) <= 1e-12
    for ps in general_structures:
        assert bilinear_residual(ps) < 1e-11


def test_randomized_structures_hold_identities_to_machine_precision(randomized_structures, rng):
    for ps in randomized_structures:
        assert ps.j.square_residual() <= 1e-12
        assert np.max(np.abs(kernels.metric_from_j(ps.omega.components, ps.j.matrix) - ps.metric.entries)) <= 1e-12
        for _ in range(8):
            assert contraction_residual(ps, rng.normal(size=DIM)) <= 1e-11


def test_bilinear_identity_detects_broken_pair():
    ps = normal_form()
    broken = PointStructure(
        phi=ps.phi,
        omega=ps.omega + 0.5 * AltTensor.basis(1, 3),
        j=ps.j,
        metric=ps.metric,
        normsq=ps.normsq,
        phihat=ps.phihat,
    )
    assert bilinear_residual(broken) > 1e-3


def test_contraction_identities(general_structures, rng):
    for ps in general_structures:
        for _ in range(8):
            assert contraction_residual(ps, rng.normal(size=DIM)) < 1e-10


def test_variation_dual_examples(standard_structure):
    phi, phihat = standard_structure.phi, standard_structure.phihat
    assert np.allclose(variation_dual(phi, 0.7 * phi).components, 0.7 * phihat.components)
    assert np.allclose(variation_dual(phi, 0.7 * phihat).components, -0.7 * phi.components)


def test_variation_dual_finite_difference(general_structures, rng):
    eps = 1e-5
    for ps in general_structures[:10]:
        delta = random_form(rng, 3)
        expected = (hitchin_dual(ps.phi + eps * delta) - hitchin_dual(ps.phi - eps * delta)) / (2 * eps)
        error = (variation_dual(ps.phi, delta) - expected).max_abs()
        assert error <= 1e-7 * max(expected.max_abs(), 1.0)


def test_variation_dual_second_order(standard_structure, rng):
    delta = random_form(rng, 3)
    exact = variation_dual(standard_structure.phi, delta)
    errors = []
    for eps in (2e-2, 1e-2):
        plus = hitchin_dual(standard_structure.phi + eps * delta)
        minus = hitchin_dual(standard_structure.phi - eps * delta)
        errors.append(((plus - minus) / (2 * eps) - exact).max_abs())
    assert 3.5 <= errors[0] / errors[1] <= 4.5


def test_variation_norm_squared_examples(standard_structure):
    ps = standard_structure
    zero3, zero2 = AltTensor.zeros(3), AltTensor.zeros(2)
    assert variation_norm_squared(ps, 0.3 * ps.phi, zero2) == pytest.approx(0.6)
    assert variation_norm_squared(ps, zero3, 0.3 * ps.omega) == pytest.approx(-0.9)


def test_variation_norm_squared_finite_difference(general_structures, rng):
    eps = 1e-5
    for ps in general_structures[:10]:
        dphi, domega = random_form(rng, 3), 0.1 * random_form(rng, 2)
        plus = norm_squared(ps.phi + eps * dphi, ps.omega + eps * domega)
        minus = norm_squared(ps.phi - eps * dphi, ps.omega - eps * domega)
        expected = (plus - minus) / (2 * eps)
        assert variation_norm_squared(ps, dphi, domega) == pytest.approx(expected, rel=1e-7, abs=1e-9)


def test_variation_norm_squared_second_order(standard_structure, rng):
    ps = standard_structure
    dphi, domega = random_form(rng, 3), 0.1 * random_form(rng, 2)
    exact = variation_norm_squared(ps, dphi, domega)
    errors = []
    for eps in (2e-2, 1e-2):
        plus = norm_squared(ps.phi + eps * dphi, ps.omega + eps * domega)
        minus = norm_squared(ps.phi - eps * dphi, ps.omega - eps * domega)
        errors.append(abs((plus - minus) / (2 * eps) - exact))
    assert 3.5 <= errors[0] / errors[1] <= 4.5


def test_lefschetz_invert_examples(rng):
    omega = standard_omega()
    e13 = AltTensor.basis(1, 3)
    assert np.allclose(lefschetz_invert(omega, wedge(omega, omega)).components, omega.components)
    assert np.allclose(lefschetz_invert(omega, wedge(omega, e13)).components, e13.components)
    gamma = random_form(rng, 4)
    assert (wedge(omega, lefschetz_invert(omega, gamma)) - gamma).max_abs() < 1e-12

    with pytest.raises(DegenerateError):
        lefschetz_invert(AltTensor.basis(1, 2), gamma)


def test_sp6_randomize(standard_structure):
    unchanged = symplectic_pullback(standard_structure, np.eye(DIM))
    assert np.allclose(unchanged.phi.components, standard_structure.phi.components)
    assert np.allclose(unchanged.omega.components, standard_structure.omega.components)

    first, second = sp6_randomize(standard_structure, 42), sp6_randomize(standard_structure, 42)
    assert np.array_equal(first.phi.components, second.phi.components)
    assert np.array_equal(first.metric.entries, second.metric.entries)

    for seed in range(10):
        ps = sp6_randomize(standard_structure, seed)
        assert np.allclose(ps.omega.components, standard_structure.omega.components, atol=1e-12)
        assert wedge(ps.phi, ps.omega).max_abs() < 1e-13 * max(1.0, ps.phi.max_abs())


def test_type_decompose_omega():
    j = AcStructure.standard()
    decomposition = type_decompose(j, standard_omega())
    assert np.allclose(decomposition.part(1, 1).components, standard_omega().components)
    assert np.allclose(decomposition.part(2, 0).components, 0.0)
    assert np.allclose(decomposition.part(0, 2).components, 0.0)


def test_type_decompose_phi(standard_structure):
    ps = standard_structure
    decomposition = type_decompose(ps.j, ps.phi, ps)
    assert np.allclose(decomposition.part(2, 1).components, 0.0)
    assert np.allclose(decomposition.part(1, 2).components, 0.0)
    holomorphic = decomposition.part(3, 0).components
    assert np.allclose(2.0 * holomorphic, ps.phi.components + 1j * ps.phihat.components)

    refined = decomposition.refined
    assert refined.f1 == pytest.approx(0.5)
    assert refined.f2 == pytest.approx(0.0, abs=1e-15)
    assert refined.alpha.max_abs() < 1e-14
    assert refined.beta.max_abs() < 1e-14


def test_type_decompose_mixed(standard_structure, general_structures, rng):
    ps = standard_structure
    e135 = AltTensor.basis(1, 3, 5)
    refined = type_decompose(ps.j, e135, ps).refined
    assert refined.f1 == pytest.approx(0.25)
    assert refined.alpha.max_abs() > 0.1

    for structure in general_structures[:6]:
        for degree in range(DIM + 1):
            a = random_form(rng, degree)
            decomposition = type_decompose(structure.j, a, structure)
            assert np.allclose(decomposition.total(), a.components, atol=1e-12 * max(1.0, a.max_abs()))
            for part in decomposition.components:
                turned = kernels.pullback(part.components, structure.j.matrix, degree)
                assert np.allclose(turned, part.eigenvalue * part.components, atol=1e-10)

        delta = random_form(rng, 3)
        split = type_decompose(structure.j, delta, structure).refined
        rebuilt = (
            2 * split.f1 * structure.phi
            - 2 * split.f2 * structure.phihat
            + split.alpha
            + wedge(structure.omega, split.beta)
        )
        assert np.allclose(rebuilt.components, delta.components)
        assert lambda_contraction(structure.omega, split.alpha).max_abs() < 1e-9
        assert abs(inner_product(structure.metric, split.alpha, structure.phi)) < 1e-9


def test_batched_structure_matches_pointwise(general_structures):
    phis = np.stack([ps.phi.components for ps in general_structures])
    omegas = np.stack([ps.omega.components for ps in general_structures])
    batched = kernels.structure(phis, omegas)
    assert batched["positive"].all()
    for index, ps in enumerate(general_structures):
        assert np.allclose(batched["metric"][index], ps.metric.entries)
        assert np.allclose(batched["phihat"][index], ps.phihat.components)
        assert batched["normsq"][index] == pytest.approx(ps.normsq)


def test_full_tensor_of_two_form_is_matrix():
    omega = standard_omega()
    matrix = full_tensor(omega.components, 2)
    assert matrix[0, 1] == 1.0 and matrix[1, 0] == -1.0
