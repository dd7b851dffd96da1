"""
variations - First variations, identity residuals and type decompositions of Type IIA pairs.
Residual functions return the max-norm of the difference of the two sides of an identity,
so callers can compare them against any tolerance.
"""
from dataclasses import dataclass, field

import numpy as np

from errors import DegenerateError
from forms6 import kernels
from forms6.alt_tensor import AltTensor, interior_product, j_action, lambda_contraction, wedge
from forms6.multi_index import DIM
from forms6.structure import almost_complex


def variation_dual(phi, deltaphi):
    """Derivative of phi -> phihat in the direction deltaphi"""
    j = almost_complex(phi)
    phihat = j_action(j, phi)
    volume = float(kernels.top(phi.components, 3, phihat.components, 3))
    along_phi = float(kernels.top(deltaphi.components, 3, phi.components, 3)) / volume
    along_phihat = float(kernels.top(deltaphi.components, 3, phihat.components, 3)) / volume
    return -j_action(j, deltaphi) + 2.0 * along_phi * phi + 2.0 * along_phihat * phihat


def variation_norm_squared(ps, deltaphi, deltaomega):
    """Derivative of |phi|^2 along (deltaphi, deltaomega)"""
    pairing = float(kernels.inner(deltaphi.components, ps.phi.components, ps.metric.inverse(), 3))
    trace = float(lambda_contraction(ps.omega, deltaomega).components[0])
    return 2.0 * pairing - ps.normsq * trace


def bilinear_residual(ps):
    """max |omega^ij phi_iab phi_jcd - |phi|^2/4 (w_ac g_bd - w_bc g_ad - w_ad g_bc + w_bd g_ac)|"""
    phi = ps.phi.full()
    w = ps.omega.full()
    g = ps.metric.entries
    left = np.einsum("ij,iab,jcd->abcd", ps.inverse_omega, phi, phi)
    right = (
        np.einsum("ac,bd->abcd", w, g)
        - np.einsum("bc,ad->abcd", w, g)
        - np.einsum("ad,bc->abcd", w, g)
        + np.einsum("bd,ac->abcd", w, g)
    )
    return float(np.max(np.abs(left - 0.25 * ps.normsq * right)))


def contraction_residual(ps, v):
    """Residual of iota_v phi = L(v ^ phihat) = L(Jv ^ phi) and iota_v phihat = -L(v ^ phi) = L(Jv ^ phihat)

    L is the symplectic contraction, v is lowered with the metric and Jv is the
    J-action on that 1-form.
    """
    lowered = ps.metric.lower(v)
    turned = j_action(ps.j, lowered)
    omega = ps.omega
    i_phi = interior_product(v, ps.phi)
    i_phihat = interior_product(v, ps.phihat)
    differences = [
        i_phi - lambda_contraction(omega, wedge(lowered, ps.phihat)),
        i_phi - lambda_contraction(omega, wedge(turned, ps.phi)),
        i_phihat + lambda_contraction(omega, wedge(lowered, ps.phi)),
        i_phihat - lambda_contraction(omega, wedge(turned, ps.phihat)),
    ]
    return max(diff.max_abs() for diff in differences)


def volume_residual(ps):
    """|sqrt(det g) - omega^3/3!|"""
    return abs(float(np.sqrt(np.linalg.det(ps.metric.entries)) - kernels.pfaffian(ps.omega.components)))


def lefschetz_invert(omega, gamma):
    """The unique 2-form lambda with omega ^ lambda = gamma"""
    try:
        solution = kernels.lefschetz_solve(omega.components, gamma.components)
    except np.linalg.LinAlgError as exc:
        raise DegenerateError("Lefschetz map is singular", pfaffian=float(kernels.pfaffian(omega.components))) from exc
    return AltTensor(solution, 2)


@dataclass(frozen=True, eq=False)
class TypeComponent:
    """(p, q) part of a real form, complex components"""

    p: int
    q: int
    components: np.ndarray

    @property
    def eigenvalue(self):
        """Eigenvalue of the J-action on forms of this type"""
        return 1j ** (self.p - self.q)


@dataclass(frozen=True, eq=False)
class RefinedSplit:
    """deltaphi = 2 f1 phi - 2 f2 phihat + alpha + omega ^ beta with alpha primitive"""

    f1: float
    f2: float
    alpha: AltTensor
    beta: AltTensor


@dataclass(frozen=True, eq=False)
class TypeDecomposition:
    components: list = field(default_factory=list)
    refined: RefinedSplit = None

    def total(self):
        return np.sum([part.components for part in self.components], axis=0)

    def part(self, p, q):
        for component in self.components:
            if (component.p, component.q) == (p, q):
                return component
        return None


def type_projections(j, a):
    """Project a k-form onto its (p, q) parts by averaging the rotations cos t + sin t J"""
    k = a.degree
    samples = 2 * k + 2
    angles = 2 * np.pi * np.arange(samples) / samples
    rotations = np.cos(angles)[:, None, None] * np.eye(DIM) + np.sin(angles)[:, None, None] * j.matrix
    rotated = kernels.pullback(np.broadcast_to(a.components, (samples, a.components.size)), rotations, k)
    parts = []
    for m in range(-k, k + 1, 2):
        p, q = (k + m) // 2, (k - m) // 2
        if p > DIM // 2 or q > DIM // 2:
            continue
        weights = np.exp(-1j * m * angles)
        parts.append(TypeComponent(p, q, np.tensordot(weights, rotated, axes=1) / samples))
    return parts


def refined_split(ps, deltaphi):
    normsq = ps.normsq
    inverse = ps.metric.inverse()
    f1 = float(kernels.inner(deltaphi.components, ps.phi.components, inverse, 3)) / (2.0 * normsq)
    f2 = -float(kernels.inner(deltaphi.components, ps.phihat.components, inverse, 3)) / (2.0 * normsq)
    rest = deltaphi - 2.0 * f1 * ps.phi + 2.0 * f2 * ps.phihat
    target = kernels.wedge(ps.omega.components, 2, rest.components, 3)
    try:
        beta = np.linalg.solve(kernels.square_lefschetz_matrix(ps.omega.components), target)
    except np.linalg.LinAlgError as exc:
        raise DegenerateError("omega^2 ^ . is singular on 1-forms") from exc
    beta = AltTensor(beta, 1)
    alpha = rest - wedge(ps.omega, beta)
    return RefinedSplit(f1=f1, f2=f2, alpha=alpha, beta=beta)


def type_decompose(j, a, structure=None):
    """(p, q) parts of a; for 3-forms with a structure also the refined split"""
    refined = None
    if a.degree == 3 and structure is not None:
        refined = refined_split(structure, a)
    return TypeDecomposition(components=type_projections(j, a), refined=refined)
