"""
compatible - Build a closed, positive 3-form primitive against a given perturbed symplectic form.
Path omega_s = s omega + (1 - s) omega~ from the background: the cohomology class of phi_s follows
a linear ODE, and the harmonic representative is repaired pointwise by a Neumann potential.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from errors import DegenerateError, NotExactError, TooFarError
from forms6 import AltTensor, wedge
from forms6.kernels import square_lefschetz_matrix
from lattice import CohomologyVector, exterior_derivative, neumann_operator, sobolev_norm, structure_fields
from lattice.pointwise import lefschetz_field, primitivity_max, wedge_fields

logger = logging.getLogger(__name__)

DEFAULT_S_STEPS = 64

# Sobolev order of the reported stability constant
CONSTANT_ORDER = 2


@dataclass
class CompatibleResult:
    phi: object
    class_path: list
    s_values: list
    positivity_margin: list
    measured_constant: float
    closedness: float
    primitivity: float
    details: dict = field(default_factory=dict)

    def final_class(self):
        return self.class_path[-1]


def class_velocity(phi_class, omega_class, omega_rate):
    """d/ds [phi_s] = -[omega_s] ^ ([omega_s]^-2 ([omega'] ^ [phi_s])) on constant forms"""
    source = wedge(omega_rate, phi_class)
    try:
        b = np.linalg.solve(square_lefschetz_matrix(omega_class.components), source.components)
    except np.linalg.LinAlgError as exc:
        raise DegenerateError("[omega_s]^2 is not invertible on 1-forms") from exc
    return -wedge(omega_class, AltTensor(b, 1))


def integrate_class(phi_class, omega_start, omega_end, s_steps=DEFAULT_S_STEPS):
    """RK4 on the class ODE from s = 0 to 1; returns the classes at every node"""
    rate = omega_end - omega_start
    h = 1.0 / s_steps
    path = [phi_class]

    def omega_at(s):
        return omega_start + s * rate

    for step in range(s_steps):
        s = step * h
        k1 = class_velocity(phi_class, omega_at(s), rate)
        k2 = class_velocity(phi_class + (0.5 * h) * k1, omega_at(s + 0.5 * h), rate)
        k3 = class_velocity(phi_class + (0.5 * h) * k2, omega_at(s + 0.5 * h), rate)
        k4 = class_velocity(phi_class + h * k3, omega_at(s + h), rate)
        phi_class = phi_class + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        path.append(phi_class)
    return path


def primitive_representative(phi_class, omega_s):
    """H[phi_s] - d lambda_s with omega_s ^ lambda_s = N(H[phi_s] ^ omega_s)"""
    grid = omega_s.grid
    harmonic = CohomologyVector.from_form(phi_class).to_field(grid)
    obstruction = wedge_fields(harmonic, omega_s)
    try:
        gamma = neumann_operator(obstruction)
    except NotExactError as exc:
        raise TooFarError("harmonic representative has a non-exact wedge with omega_s", stage="compatible") from exc
    correction = lefschetz_field(omega_s, gamma)
    return harmonic - exterior_derivative(correction)


def build_compatible_phi(omega, background, s_steps=DEFAULT_S_STEPS):
    """phi_1 with d phi_1 = 0, phi_1 ^ omega = 0 pointwise and phi_1 positive"""
    omega_bar = background.omega_tilde
    phi_bar = background.phi_tilde
    start = omega_bar.mean().as_form()
    end = omega.mean().as_form()
    classes = integrate_class(phi_bar.mean().as_form(), start, end, s_steps)

    s_values = []
    margins = []
    phi_s = phi_bar
    for step, phi_class in enumerate(classes):
        s = step / s_steps
        omega_s = omega_bar + s * (omega - omega_bar)
        phi_s = primitive_representative(phi_class, omega_s)
        structure = structure_fields(phi_s, omega_s)
        margin = float(np.min(structure.min_eigenvalue))
        s_values.append(s)
        margins.append(margin)
        location = structure.first_failure()
        if location is not None:
            raise TooFarError("positivity lost along the symplectic path", stage="compatible", s=s, location=location)

    closedness = exterior_derivative(phi_s).max_abs()
    primitivity = primitivity_max(phi_s, omega)
    denominator = sobolev_norm(omega - omega_bar, CONSTANT_ORDER)
    measured = sobolev_norm(phi_s - phi_bar, CONSTANT_ORDER) / denominator if denominator > 0 else 0.0
    logger.info(
        "compatible phi built: closedness %.3g, primitivity %.3g, min metric eigenvalue %.6g, C=%.4g",
        closedness, primitivity, min(margins), measured,
    )
    return CompatibleResult(
        phi=phi_s,
        class_path=[CohomologyVector.from_form(phi_class) for phi_class in classes],
        s_values=s_values,
        positivity_margin=margins,
        measured_constant=measured,
        closedness=closedness,
        primitivity=primitivity,
        details={"class_error": (phi_s.mean() - CohomologyVector.from_form(classes[-1])).max_abs()},
    )
