"""
kernels - Batched pointwise multilinear algebra on component arrays.
Every function takes arrays whose trailing axis holds form components (or trailing
6x6 axes for matrices) and broadcasts over any leading axes, so the same code serves a
single point and a chunk of grid points. Full antisymmetric tensors appear only inside
these kernels.
"""
import numpy as np

from forms6.multi_index import (
    DIM,
    compound,
    contraction_table,
    dimension,
    full_tensor,
    hitchin_table,
    interior_table,
    position,
    star_table,
    wedge_table,
)

# Positivity thresholds: lambda(phi) must be below, smallest metric eigenvalue above
LAMBDA_THRESHOLD = -1e-14
EIGENVALUE_THRESHOLD = 1e-10

_TOP = position(6)[tuple(range(DIM))]


def degree_of(components):
    """Infer the form degree from the trailing component count (ambiguous counts resolved low)"""
    count = np.shape(components)[-1]
    for k in range(DIM + 1):
        if dimension(k) == count:
            return k
    raise ValueError(f"{count} components do not describe a form in dimension {DIM}")


def wedge(a, p, b, q):
    """Exterior product of a p-form and a q-form"""
    return np.einsum("...i,...j,ijk->...k", a, b, wedge_table(p, q))


def top(a, p, b, q):
    """Coefficient of e^123456 in a ^ b (p + q = 6)"""
    if p + q != DIM:
        raise ValueError("top component needs complementary degrees")
    return wedge(a, p, b, q)[..., _TOP]


def interior(v, a, k):
    """iota_v a for vectors v (..., 6)"""
    return np.einsum("...i,...J,iJI->...I", v, a, interior_table(k))


def two_form_matrix(omega):
    """Antisymmetric matrix omega_ij of a 2-form"""
    return full_tensor(omega, 2)


def pullback(a, matrix, k):
    """(A^* a)(X1..Xk) = a(A X1, .., A Xk) for linear maps A (..., 6, 6)"""
    if k == 0:
        return np.array(a, copy=True)
    return np.einsum("...I,...IJ->...J", a, compound(matrix, k))


def raise_indices(a, inverse_metric, k):
    """Contravariant components a^I = g^{IJ} a_J"""
    if k == 0:
        return np.array(a, copy=True)
    return np.einsum("...IJ,...J->...I", compound(inverse_metric, k), a)


def inner(a, b, inverse_metric, k):
    """(1/k!)-normalized pointwise inner product (a, b)_g"""
    return np.einsum("...I,...I->...", a, raise_indices(b, inverse_metric, k))


def hodge_star(a, metric, k):
    """Hodge star of a k-form against the metric and the orientation e^123456"""
    inverse = np.linalg.inv(metric)
    volume = np.sqrt(np.linalg.det(metric))
    raised = raise_indices(a, inverse, k)
    return np.expand_dims(volume, -1) * np.einsum("...I,IJ->...J", raised, star_table(k))


def flat_star(a, k):
    """Hodge star against the identity metric"""
    return np.einsum("...I,IJ->...J", a, star_table(k))


def symplectic_inverse(omega):
    """omega^{ij} with omega^{ia} omega_{aj} = delta^i_j"""
    return np.linalg.inv(two_form_matrix(omega))


def contract_lambda(inverse_omega, a, k):
    """Lambda_omega a with (Lambda A)_I = 1/2 omega^{ij} A_{j i I}"""
    return 0.5 * np.einsum("...ij,ijJI,...J->...I", inverse_omega, contraction_table(k), a)


def pfaffian(omega):
    """Coefficient of omega^3/3! against e^123456"""
    square = wedge(omega, 2, omega, 2)
    return top(square, 4, omega, 2) / 6.0


def hitchin_k(phi):
    """Hitchin's endomorphism K(phi)^i_j, quadratic in phi"""
    return np.einsum("ijab,...a,...b->...ij", hitchin_table(), phi, phi)


def hitchin_lambda(k_matrix):
    """lambda = tr(K^2) / 6"""
    return np.einsum("...ij,...ji->...", k_matrix, k_matrix) / 6.0


def complex_structure(phi):
    """(J, lambda) with J = K / sqrt(-lambda); J is NaN where lambda >= threshold"""
    k_matrix = hitchin_k(phi)
    lam = hitchin_lambda(k_matrix)
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(lam < LAMBDA_THRESHOLD, 1.0 / np.sqrt(np.abs(lam)), np.nan)
    return k_matrix * scale[..., None, None], lam


def j_action(a, j, k):
    """(J a)(X1..Xk) = a(J X1, .., J Xk)"""
    return pullback(a, j, k)


def norm_squared(phi, phihat, omega):
    """|phi|^2 from |phi|^2 omega^3/3! = phi ^ phihat"""
    return top(phi, 3, phihat, 3) / pfaffian(omega)


def metric_from_phi(phi, inverse_omega, normsq):
    """g_ij = -|phi|^-2 phi_iab phi_jkp omega^ak omega^bp"""
    full = full_tensor(phi, 3)
    contracted = np.einsum("...iab,...jkp,...ak,...bp->...ij", full, full, inverse_omega, inverse_omega,
                           optimize=True)
    return -contracted / np.asarray(normsq)[..., None, None]


def metric_from_j(omega, j):
    """g(X, Y) = omega(X, J Y)"""
    return np.einsum("...ik,...kj->...ij", two_form_matrix(omega), j)


def lefschetz_matrix(omega):
    """Matrix of lambda -> omega ^ lambda on 2-forms, (..., 15, 15) acting on column vectors"""
    return np.einsum("...i,ijk->...kj", omega, wedge_table(2, 2))


def lefschetz_solve(omega, gamma):
    """Solve omega ^ lambda = gamma for 2-forms lambda, pointwise"""
    return np.linalg.solve(lefschetz_matrix(omega), gamma[..., None])[..., 0]


def square_lefschetz_matrix(omega):
    """Matrix of alpha -> omega ^ omega ^ alpha from 1-forms to 5-forms, (..., 6, 6)"""
    square = wedge(omega, 2, omega, 2)
    return np.einsum("...i,ijk->...kj", square, wedge_table(4, 1))


def structure(phi, omega):
    """All derived pointwise data of a pair, without raising

    Returns a dict with j, lam, phihat, pfaffian, normsq, inverse_omega, metric,
    min_eigenvalue and a boolean mask `positive`.
    """
    j, lam = complex_structure(phi)
    phihat = j_action(phi, np.nan_to_num(j), 3)
    pf = pfaffian(omega)
    with np.errstate(invalid="ignore", divide="ignore"):
        normsq = top(phi, 3, phihat, 3) / pf
    inverse_omega = symplectic_inverse(omega)
    metric = metric_from_phi(phi, inverse_omega, np.where(np.isfinite(normsq) & (normsq != 0), normsq, 1.0))
    metric = 0.5 * (metric + np.swapaxes(metric, -1, -2))
    min_eigenvalue = np.linalg.eigvalsh(metric)[..., 0]
    positive = (lam < LAMBDA_THRESHOLD) & (pf > 0) & (normsq > 0) & (min_eigenvalue > EIGENVALUE_THRESHOLD)
    return {
        "j": j,
        "lam": lam,
        "phihat": phihat,
        "pfaffian": pf,
        "normsq": normsq,
        "inverse_omega": inverse_omega,
        "metric": metric,
        "min_eigenvalue": min_eigenvalue,
        "positive": positive,
    }
