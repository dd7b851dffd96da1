"""
rhs - Right-hand sides of the Type IIA flow and of its DeTurck-reparametrized form.
Nonlinear products are computed pointwise and filtered by the 2/3 rule before every
spectral derivative, so each output is d-exact up to round-off.
"""
import logging
from dataclasses import dataclass

import numpy as np

from lattice import dealias, dealias_values, exterior_derivative, l2_norm, nijenhuis_norm, vector_l2_norm
from lattice.form_field import TensorField
from lattice.pointwise import interior_field, lambda_field, require_positive, scale_field
from lattice.spectral import gradient

logger = logging.getLogger(__name__)


def state_structure(state, stage=None):
    """Pointwise structure of the state; DegenerateError with location and time where positivity fails"""
    return require_positive(state.phi, state.omega, time=state.time, stage=stage)


def rhs_primary(state, structure=None):
    """d Lambda_omega d(|phi|^2 phihat)"""
    if structure is None:
        structure = state_structure(state, "rhs")
    product = dealias(scale_field(structure.normsq, structure.phihat))
    contracted = lambda_field(structure.inverse_omega, exterior_derivative(product))
    return exterior_derivative(dealias(contracted))


def metric_contraction(metric, inverse_metric):
    """g^{pq} Gamma^k_pq of a metric field in flat coordinates, as a rank-1 field"""
    grid = metric.grid
    dg = gradient(dealias_values(metric.values, grid), grid)
    ginv = inverse_metric.values
    # A_s = g^{pq} d_p g_qs, B_s = 1/2 g^{pq} d_s g_pq
    divergence = np.einsum("pq...,pqs...->s...", ginv, dg)
    trace_derivative = 0.5 * np.einsum("pq...,spq...->s...", ginv, dg)
    values = np.einsum("ks...,s...->k...", ginv, divergence - trace_derivative)
    return TensorField(grid, values, 1)


def deturck_ricci_vector(state, structure=None):
    """The Ricci-flow DeTurck field g^{pq}(Gamma - Gamma_ref)^k_pq; Gamma_ref vanishes for a constant reference"""
    if structure is None:
        structure = state_structure(state, "deturck")
    return metric_contraction(structure.metric, structure.inverse_metric)


def deturck_vector(state, structure=None):
    """V^k = |phi|^2 g^{pq}(Gamma - Gamma_ref)^k_pq - g^{lk} d_l |phi|^2"""
    if structure is None:
        structure = state_structure(state, "deturck")
    grid = state.grid
    normsq = structure.normsq
    ricci = metric_contraction(structure.metric, structure.inverse_metric)
    dnorm = gradient(dealias_values(normsq, grid), grid)
    steepest = np.einsum("lk...,l...->k...", structure.inverse_metric.values, dnorm)
    values = normsq[None] * ricci.values - steepest
    return TensorField(grid, values, 1)


def _drift(vector, form):
    """d(iota_V form), filtered before differentiating"""
    return exterior_derivative(dealias(interior_field(vector, form)))


@dataclass(frozen=True, eq=False)
class Evaluation:
    """One evaluation of the reparametrized right-hand side"""

    dphi: object
    domega: object
    vector: TensorField
    structure: object


def evaluate(state, vector=None, reparametrized=True, stage="rhs"):
    """Right-hand side with the data the integrator and monitors reuse"""
    structure = state_structure(state, stage)
    primary = rhs_primary(state, structure)
    if not reparametrized:
        zero = TensorField.zeros(state.grid, 1)
        return Evaluation(primary, state.omega * 0.0, zero, structure)
    if vector is None:
        vector = deturck_vector(state, structure)
    return Evaluation(primary + _drift(vector, state.phi), _drift(vector, state.omega), vector, structure)


def rhs_reparametrized(state, vector=None):
    """(d Lambda d(|phi|^2 phihat) + d iota_V phi, d iota_V omega); V defaults to the DeTurck field"""
    evaluation = evaluate(state, vector)
    return evaluation.dphi, evaluation.domega


def _as_vector_field(grid, v):
    if isinstance(v, TensorField):
        return v
    return TensorField.constant(grid, np.asarray(v, dtype=float).reshape(-1))


def soliton_residual(state, v):
    """L^2 norms of the two steady-soliton equations for the vector field v (field or constant 6-vector)"""
    vector = _as_vector_field(state.grid, v)
    structure = state_structure(state, "soliton")
    first = rhs_primary(state, structure) + _drift(vector, state.phi)
    second = _drift(vector, state.omega)
    return l2_norm(first), l2_norm(second)


def stationarity_report(state):
    """Diagnostics of a (near) stationary point: a stationary point has V = 0, constant |phi| and integrable J"""
    evaluation = evaluate(state, stage="stationarity")
    normsq = evaluation.structure.normsq
    report = {
        "rhs_l2": l2_norm(evaluation.dphi),
        "omega_rhs_l2": l2_norm(evaluation.domega),
        "primary_l2": l2_norm(rhs_primary(state, evaluation.structure)),
        "deturck_l2": vector_l2_norm(evaluation.vector),
        "normsq_oscillation": float(np.max(normsq) - np.min(normsq)),
        "nijenhuis": nijenhuis_norm(evaluation.structure.j),
    }
    logger.debug("stationarity report at t=%.6g: %s", state.time, report)
    return report
