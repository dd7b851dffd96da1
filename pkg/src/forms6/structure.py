"""
structure - Type IIA pairs at a point: Hitchin's construction, the induced metric and the normal form.
Follows Single Responsibility Principle - only derives (J, g, phihat, |phi|^2) from a pair
(phi, omega) and generates test structures; variational formulas live in variations.py.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from errors import NotPositiveError, OrientationError, PrimitivityError
from forms6 import kernels
from forms6.alt_tensor import AcStructure, AltTensor, Metric6, pullback, wedge
from forms6.multi_index import DIM

logger = logging.getLogger(__name__)

# Relative size of phi ^ omega tolerated before a pair counts as non-primitive
PRIMITIVITY_TOLERANCE = 1e-9

# Size of the symmetric generator behind random symplectomorphisms; keeps the pulled-back
# metric well conditioned so identities hold to machine precision without rescaling
SP6_SPREAD = 0.1


def hitchin_invariants(phi):
    """(lambda, K) of a 3-form; lambda < 0 iff phi induces an almost-complex structure"""
    k_matrix = kernels.hitchin_k(phi.components)
    return float(kernels.hitchin_lambda(k_matrix)), k_matrix


def almost_complex(phi):
    lam, k_matrix = hitchin_invariants(phi)
    if lam >= kernels.LAMBDA_THRESHOLD:
        raise NotPositiveError("3-form does not induce an almost-complex structure", lam=lam)
    return AcStructure(k_matrix / np.sqrt(-lam))


def hitchin_dual(phi):
    """phihat = phi(J., J., J.)"""
    j = almost_complex(phi)
    return pullback(phi, j.matrix)


def norm_squared(phi, omega):
    """|phi|^2 from |phi|^2 omega^3/3! = phi ^ phihat"""
    pf = float(kernels.pfaffian(omega.components))
    if pf <= 0:
        raise OrientationError("omega^3 does not match the orientation e^123456", pfaffian=pf)
    phihat = hitchin_dual(phi)
    return float(kernels.top(phi.components, 3, phihat.components, 3)) / pf


def primitivity_residual(phi, omega):
    """max |phi ^ omega| relative to |phi| |omega|"""
    scale = max(phi.max_abs() * omega.max_abs(), 1e-300)
    return wedge(phi, omega).max_abs() / scale


def metric(phi, omega):
    """g_ij = -|phi|^-2 phi_iab phi_jkp omega^ak omega^bp"""
    residual = primitivity_residual(phi, omega)
    if residual > PRIMITIVITY_TOLERANCE:
        raise PrimitivityError("phi ^ omega does not vanish", residual=residual)
    normsq = norm_squared(phi, omega)
    inverse = kernels.symplectic_inverse(omega.components)
    entries = kernels.metric_from_phi(phi.components, inverse, normsq)
    g = Metric6(0.5 * (entries + entries.T))
    if not g.is_positive():
        raise NotPositiveError("induced metric is not positive definite", min_eigenvalue=g.min_eigenvalue())
    return g


@dataclass(frozen=True, eq=False)
class PointStructure:
    """A Type IIA pair at a point together with its derived data"""

    phi: AltTensor
    omega: AltTensor
    j: AcStructure
    metric: Metric6
    normsq: float
    phihat: AltTensor

    @property
    def inverse_omega(self):
        return kernels.symplectic_inverse(self.omega.components)


def point_structure(phi, omega):
    """Validating constructor: positivity, primitivity and orientation are all checked"""
    j = almost_complex(phi)
    g = metric(phi, omega)
    phihat = pullback(phi, j.matrix)
    normsq = float(kernels.top(phi.components, 3, phihat.components, 3) / kernels.pfaffian(omega.components))
    return PointStructure(phi=phi, omega=omega, j=j, metric=g, normsq=normsq, phihat=phihat)


def standard_phi(scale=1.0):
    """scale/2 (e^135 - e^146 - e^245 - e^236)"""
    half = 0.5 * scale
    return AltTensor.from_dict({(1, 3, 5): half, (1, 4, 6): -half, (2, 4, 5): -half, (2, 3, 6): -half})


def standard_phihat(scale=1.0):
    """scale/2 (e^136 + e^145 + e^235 - e^246)"""
    half = 0.5 * scale
    return AltTensor.from_dict({(1, 3, 6): half, (1, 4, 5): half, (2, 3, 5): half, (2, 4, 6): -half})


def standard_omega():
    """e^12 + e^34 + e^56"""
    return AltTensor.from_dict({(1, 2): 1.0, (3, 4): 1.0, (5, 6): 1.0})


def normal_form(scale=1.0):
    """The normal-form structure with |phi| = scale, g = identity"""
    return point_structure(standard_phi(scale), standard_omega())


def symplectic_pullback(ps, matrix):
    """Pull both forms back by a linear map and rebuild the derived data"""
    return point_structure(pullback(ps.phi, matrix), pullback(ps.omega, matrix))


def random_symplectic_matrix(omega, rng, spread=SP6_SPREAD):
    """exp(Omega^-1 S) with S symmetric: a linear symplectomorphism of omega"""
    symmetric = rng.normal(scale=spread, size=(DIM, DIM))
    symmetric = 0.5 * (symmetric + symmetric.T)
    generator = np.linalg.solve(kernels.two_form_matrix(omega.components), symmetric)
    return expm(generator)


def sp6_randomize(ps, seed, spread=SP6_SPREAD):
    """Pull (phi, omega) back by a random linear symplectomorphism of omega, deterministic per seed"""
    rng = np.random.default_rng(seed)
    matrix = random_symplectic_matrix(ps.omega, rng, spread)
    logger.debug("sp6_randomize seed=%s condition=%.3g", seed, np.linalg.cond(matrix))
    return symplectic_pullback(ps, matrix)


def random_structure(seed, spread=0.3):
    """A Type IIA pair pulled back from a rescaled normal form by a random orientation-preserving map"""
    rng = np.random.default_rng(seed)
    while True:
        matrix = np.eye(DIM) + rng.normal(scale=spread, size=(DIM, DIM))
        if np.linalg.det(matrix) > 0.1:
            break
    scale = rng.uniform(0.5, 2.0)
    return symplectic_pullback(normal_form(scale), matrix)
