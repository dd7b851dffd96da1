"""
linearization - Constrained variations of the flat structure and finite-difference checks of
DE(dphi, domega) = -|phi|^2 Box dphi and DF(dphi, domega) = -|phi|^2 Box domega.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from errors import ConstraintError
from flow import TypeIIAState, rhs_reparametrized
from forms6 import AltTensor, normal_form, wedge
from forms6.kernels import square_lefschetz_matrix
from lattice import FormField, exterior_derivative, hodge_laplacian, l2_norm, neumann_operator, random_band_limited
from lattice.pointwise import flat_star_field, lefschetz_field, wedge_constant
from lattice.spectral import derivative_energy

logger = logging.getLogger(__name__)

EPS_RANGE = (1e-6, 1e-3)

# Size of the wedge obstruction below which a variation counts as constrained
CONSTRAINT_TOLERANCE = 1e-10

# Closedness demanded of any variation handed to linearization_check
CLOSEDNESS_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class VariationPair:
    """Closed (dphi, domega) around a constant background, with H = *(dphi ^ omega + phi ^ domega)"""

    dphi: FormField
    domega: FormField
    h_field: FormField
    background: object
    seed: int = None
    mode_budget: int = 0

    @property
    def grid(self):
        return self.dphi.grid

    def h_norm(self):
        return self.h_field.max_abs()

    def closedness(self):
        return max(exterior_derivative(self.dphi).max_abs(), exterior_derivative(self.domega).max_abs())


def wedge_obstruction(dphi, domega, background):
    """The 5-form dphi ^ omega + phi ^ domega around a constant background"""
    return wedge_constant(background.omega, dphi) + wedge_constant(background.phi, domega)


def _pair(dphi, domega, background, seed, mode_budget):
    scale = max(dphi.max_abs(), domega.max_abs())
    if scale > 0:
        dphi, domega = dphi / scale, domega / scale
    h_field = flat_star_field(wedge_obstruction(dphi, domega, background))
    return VariationPair(dphi, domega, h_field, background, seed, mode_budget)


def _raw_variation(grid, rng, mode_budget):
    """Random closed (dphi, domega): constants plus exact low-frequency parts"""
    constant_phi = AltTensor(rng.normal(size=20), 3)
    if mode_budget == 0:
        return constant_phi, AltTensor.zeros(2), FormField.zeros(grid, 3), FormField.zeros(grid, 2)
    constant_omega = AltTensor(0.5 * rng.normal(size=15), 2)
    exact_omega = exterior_derivative(random_band_limited(grid, 1, rng, max_mode=mode_budget))
    exact_phi = exterior_derivative(random_band_limited(grid, 2, rng, max_mode=mode_budget))
    return constant_phi, constant_omega, exact_phi, exact_omega


def constrained_variation(grid, seed, mode_budget=1, background=None):
    """Closed variation satisfying dphi ^ omega + phi ^ domega = 0, deterministic per seed

    The constant obstruction is removed by omega^2 ^ b (a 6x6 solve), the exact one by
    d lambda with omega ^ lambda = -N(obstruction), N the Neumann operator.
    """
    background = normal_form() if background is None else background
    rng = np.random.default_rng(seed)
    constant_phi, constant_omega, exact_phi, exact_omega = _raw_variation(grid, rng, mode_budget)

    constant_obstruction = wedge(constant_phi, background.omega) + wedge(background.phi, constant_omega)
    b = np.linalg.solve(square_lefschetz_matrix(background.omega.components), -constant_obstruction.components)
    constant_phi = constant_phi + wedge(background.omega, AltTensor(b, 1))

    if mode_budget > 0:
        obstruction = wedge_obstruction(exact_phi, exact_omega, background)
        potential = neumann_operator(obstruction)
        omega_field = FormField.constant(grid, background.omega)
        exact_phi = exact_phi + exterior_derivative(lefschetz_field(omega_field, -potential))

    dphi = FormField.constant(grid, constant_phi) + exact_phi
    domega = FormField.constant(grid, constant_omega) + exact_omega
    pair = _pair(dphi, domega, background, seed, mode_budget)
    logger.debug("constrained variation seed=%s budget=%d obstruction %.3g", seed, mode_budget, pair.h_norm())
    return pair


def unconstrained_variation(grid, seed, mode_budget=1, background=None):
    """Closed variation without the wedge repair (H generally nonzero)"""
    background = normal_form() if background is None else background
    rng = np.random.default_rng(seed)
    constant_phi, constant_omega, exact_phi, exact_omega = _raw_variation(grid, rng, mode_budget)
    dphi = FormField.constant(grid, constant_phi) + exact_phi
    domega = FormField.constant(grid, constant_omega) + exact_omega
    return _pair(dphi, domega, background, seed, mode_budget)


@dataclass
class LinearizationReport:
    eps: float
    error_phi: float
    error_omega: float
    error: float
    absolute: float
    h_norm: float
    constrained: bool
    residual_exactness: float = None
    h_ratio: float = None

    def as_row(self):
        return [self.eps, self.error_phi, self.error_omega, self.error, self.absolute, self.h_norm]


def _relative(residual, expected, variation):
    reference = expected if expected > 1e-8 * variation else variation
    return residual / reference if reference > 0 else residual


def linearization_check(var, eps):
    """Central differences of the reparametrized right-hand side against -|phi|^2 Box of the variation"""
    if not EPS_RANGE[0] <= eps <= EPS_RANGE[1]:
        raise ValueError(f"eps must lie in [{EPS_RANGE[0]}, {EPS_RANGE[1]}]")
    closedness = var.closedness()
    if closedness > CLOSEDNESS_TOLERANCE * max(1.0, var.dphi.max_abs()):
        raise ConstraintError("variation is not closed", closedness=closedness)

    grid = var.grid
    background = var.background
    phi = FormField.constant(grid, background.phi)
    omega = FormField.constant(grid, background.omega)
    plus = rhs_reparametrized(TypeIIAState(phi + eps * var.dphi, omega + eps * var.domega))
    minus = rhs_reparametrized(TypeIIAState(phi - eps * var.dphi, omega - eps * var.domega))
    derivative_phi = (plus[0] - minus[0]) / (2 * eps)
    derivative_omega = (plus[1] - minus[1]) / (2 * eps)

    expected_phi = -background.normsq * hodge_laplacian(var.dphi)
    expected_omega = -background.normsq * hodge_laplacian(var.domega)
    residual_phi = derivative_phi - expected_phi
    residual_omega = derivative_omega - expected_omega

    norms = {name: l2_norm(field) for name, field in (
        ("residual_phi", residual_phi), ("residual_omega", residual_omega),
        ("expected_phi", expected_phi), ("expected_omega", expected_omega),
        ("dphi", var.dphi), ("domega", var.domega),
    )}
    variation = math.hypot(norms["dphi"], norms["domega"])
    absolute = math.hypot(norms["residual_phi"], norms["residual_omega"])
    report = LinearizationReport(
        eps=eps,
        error_phi=_relative(norms["residual_phi"], norms["expected_phi"], variation),
        error_omega=_relative(norms["residual_omega"], norms["expected_omega"], variation),
        error=_relative(absolute, math.hypot(norms["expected_phi"], norms["expected_omega"]), variation),
        absolute=absolute,
        h_norm=var.h_norm(),
        constrained=var.h_norm() <= CONSTRAINT_TOLERANCE,
    )
    if not report.constrained:
        # The residual is then d(E * grad H): exact, and bounded by grad H
        gradient_h = math.sqrt(derivative_energy(var.h_field, 1))
        report.residual_exactness = exterior_derivative(residual_phi).max_abs()
        report.h_ratio = norms["residual_phi"] / gradient_h if gradient_h > 0 else None
    logger.debug("linearization eps=%.1e error=%.3e", eps, report.error)
    return report


def order_of_accuracy(var, eps=1e-3):
    """(report at eps, report at eps/2, error ratio); a ratio near 4 means second-order convergence"""
    coarse = linearization_check(var, eps)
    fine = linearization_check(var, eps / 2)
    ratio = coarse.absolute / fine.absolute if fine.absolute > 0 else float("inf")
    return coarse, fine, ratio
