"""
geometry - Riemannian and almost-complex diagnostics of tensor fields on the grid.
Derivatives are spectral; index placement follows values[k, p, q, ...] = T^k_pq.
"""
import logging

import numpy as np

from errors import NotPositiveError
from forms6.kernels import EIGENVALUE_THRESHOLD
from lattice.form_field import TensorField, forward, inverse
from lattice.grid import DIM
from lattice.spectral import gradient

logger = logging.getLogger(__name__)


def require_positive_metric(metric):
    """g^{-1} as a rank-2 field; NotPositiveError at the first indefinite point"""
    points = metric.points()
    eigenvalues = np.linalg.eigvalsh(points)[:, 0]
    bad = np.flatnonzero(eigenvalues <= EIGENVALUE_THRESHOLD)
    if bad.size:
        location = tuple(int(i) for i in np.unravel_index(bad[0], metric.grid.shape))
        raise NotPositiveError("metric is not positive definite", location=location, min_eigenvalue=float(eigenvalues[bad[0]]))
    inverse_points = np.linalg.inv(points)
    return TensorField(metric.grid, np.moveaxis(inverse_points, 0, -1).reshape(metric.values.shape), 2)


def christoffel(metric):
    """Gamma^k_pq = 1/2 g^ks (d_p g_qs + d_q g_ps - d_s g_pq)"""
    inverse_metric = require_positive_metric(metric)
    dg = gradient(metric.values, metric.grid)
    lowered = 0.5 * (
        np.einsum("pqs...->spq...", dg)
        + np.einsum("qps...->spq...", dg)
        - dg
    )
    values = np.einsum("ks...,spq...->kpq...", inverse_metric.values, lowered)
    return TensorField(metric.grid, values, 3)


def riemann_tensor(metric):
    """R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik"""
    gamma = christoffel(metric).values
    grid = metric.grid
    dgamma = gradient(gamma, grid)
    values = (
        np.einsum("iljk...->lijk...", dgamma)
        - np.einsum("jlik...->lijk...", dgamma)
        + np.einsum("lim...,mjk...->lijk...", gamma, gamma)
        - np.einsum("ljm...,mik...->lijk...", gamma, gamma)
    )
    return TensorField(grid, values, 4)


def riemann_sup(metric):
    """Grid sup of the coordinate norm of the Riemann tensor"""
    return float(np.max(riemann_tensor(metric).pointwise_norm()))


def curvature_proxy(metric):
    """Grid sup of all spectral second derivatives of g"""
    grid = metric.grid
    spectrum = forward(metric.values)
    ik = [1j * k for k in grid.derivative_wavenumbers]
    best = 0.0
    axes = grid.resolved_axes
    for position, first in enumerate(axes):
        for second in axes[position:]:
            values = inverse(spectrum * (ik[first] * ik[second]), grid)
            best = max(best, float(np.max(np.abs(values))))
    return best


def nijenhuis(j):
    """N^k_ij = J^l_i d_l J^k_j - J^l_j d_l J^k_i - J^k_l (d_i J^l_j - d_j J^l_i)"""
    dj = gradient(j.values, j.grid)
    turned = np.einsum("li...,lkj...->kij...", j.values, dj)
    curl = np.einsum("ilj...->lij...", dj) - np.einsum("jli...->lij...", dj)
    values = turned - np.einsum("kij...->kji...", turned) - np.einsum("kl...,lij...->kij...", j.values, curl)
    return TensorField(j.grid, values, 3)


def nijenhuis_norm(j):
    return float(np.max(nijenhuis(j).pointwise_norm()))


def lower_vector(metric, vector):
    return TensorField(metric.grid, np.einsum("ab...,b...->a...", metric.values, vector.values), 1)


def raise_covector(inverse_metric, covector):
    """g^{ab} w_b for a (6, *shape) array"""
    return np.einsum("ab...,b...->a...", inverse_metric.values, covector)


def trace(inverse_metric, tensor):
    """g^{ab} T_ab..."""
    return np.einsum("ab...,ab...->...", inverse_metric.values, tensor)


def identity_field(grid):
    return TensorField.constant(grid, np.eye(DIM))
