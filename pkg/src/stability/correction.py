"""
correction - Harmonic correction of initial data near the flat structure.
On the flat torus the nearby stationary structure is the zero-mode projection of (phi0, omega0).
"""
import logging
from dataclasses import dataclass, field

from errors import IIAError, PrimitivityError, TooFarError
from flow import TypeIIAState
from forms6 import point_structure, wedge
from forms6.structure import PRIMITIVITY_TOLERANCE

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CorrectedPair:
    """(phi~, omega~): constant-coefficient stationary structure, with the projections applied"""

    phi_tilde: object
    omega_tilde: object
    provenance: dict = field(default_factory=dict)

    @property
    def grid(self):
        return self.phi_tilde.grid

    def state(self):
        return TypeIIAState(self.phi_tilde, self.omega_tilde)

    def point(self):
        """The PointStructure of the (constant) corrected pair"""
        return point_structure(self.phi_tilde.mean().as_form(), self.omega_tilde.mean().as_form())


def harmonic_correction(phi0, omega0):
    """Project (phi0, omega0) onto harmonic forms; TooFarError when the projection is not a Type IIA pair"""
    grid = phi0.grid
    phi_class = phi0.mean()
    omega_class = omega0.mean()
    phi_form, omega_form = phi_class.as_form(), omega_class.as_form()

    # The wedge of the harmonic parts is the harmonic part of phi0 ^ omega0 = 0
    scale = max(phi_form.max_abs() * omega_form.max_abs(), 1e-300)
    wedge_residual = wedge(phi_form, omega_form).max_abs() / scale
    if wedge_residual > PRIMITIVITY_TOLERANCE:
        raise PrimitivityError("harmonic parts are not primitive", stage="correction", residual=wedge_residual)
    try:
        point = point_structure(phi_form, omega_form)
    except IIAError as exc:
        raise TooFarError("harmonic projection is not a Type IIA structure", stage="correction") from exc

    phi_tilde = phi_class.to_field(grid)
    omega_tilde = omega_class.to_field(grid)
    provenance = {
        "projection": "zero mode",
        "wedge_residual": wedge_residual,
        "phi_remainder_harmonic": (phi0 - phi_tilde).mean().max_abs(),
        "omega_remainder_harmonic": (omega0 - omega_tilde).mean().max_abs(),
        "normsq": point.normsq,
        "min_metric_eigenvalue": point.metric.min_eigenvalue(),
    }
    logger.info("harmonic correction: |phi~|^2=%.6g, wedge residual %.3g", point.normsq, wedge_residual)
    return CorrectedPair(phi_tilde, omega_tilde, provenance)
