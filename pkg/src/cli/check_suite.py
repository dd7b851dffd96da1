"""
check_suite - Invariant suites behind the `check` command.
Each check measures the residual of one identity and compares it against a tolerance;
run_suites turns any failed check into an InvariantSuiteError carrying the whole table.
"""
import logging
from dataclasses import dataclass

import numpy as np

from errors import InvariantSuiteError
from forms6 import (
    bilinear_residual,
    contraction_residual,
    normal_form,
    sp6_randomize,
    volume_residual,
)
from forms6 import kernels
from forms6.multi_index import DIM
from lattice import (
    FormField,
    codifferential,
    exterior_derivative,
    green_inverse,
    harmonic_projection,
    hodge_laplacian,
    l2_inner,
    l2_norm,
    neumann_operator,
    random_band_limited,
    structure_fields,
)

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 1000


@dataclass(frozen=True)
class InvariantCheck:
    suite: str
    name: str
    residual: float
    tolerance: float
    samples: int = 1

    @property
    def passed(self):
        return bool(np.isfinite(self.residual)) and self.residual <= self.tolerance

    def row(self):
        return [self.suite, self.name, self.samples, self.residual, self.tolerance, "pass" if self.passed else "FAIL"]


CHECK_COLUMNS = ["suite", "check", "samples", "residual", "tolerance", "status"]


def _worst(values):
    return float(max(values)) if values else 0.0


def forms6_suite(samples=DEFAULT_SAMPLES, seed=0):
    """Pointwise identities on Sp(6)-randomized normal forms"""
    rng = np.random.default_rng(seed)
    structures = [sp6_randomize(normal_form(), seed + index) for index in range(samples)]

    bilinear, square, metric_gap, volume, contraction = [], [], [], [], []
    for ps in structures:
        j = ps.j.matrix
        g = ps.metric.entries
        bilinear.append(bilinear_residual(ps))
        square.append(ps.j.square_residual())
        metric_gap.append(float(np.max(np.abs(kernels.metric_from_j(ps.omega.components, j) - g))))
        volume.append(volume_residual(ps))
        contraction.append(contraction_residual(ps, rng.normal(size=DIM)))

    checks = [
        InvariantCheck("forms6", "bilinear identity", _worst(bilinear), 1e-12, samples),
        InvariantCheck("forms6", "J^2 = -1", _worst(square), 1e-12, samples),
        InvariantCheck("forms6", "g = omega(., J.)", _worst(metric_gap), 1e-12, samples),
        InvariantCheck("forms6", "sqrt(det g) = omega^3/3!", _worst(volume), 1e-10, samples),
        InvariantCheck("forms6", "contraction identities", _worst(contraction), 1e-11, samples),
    ]
    logger.debug("forms6 suite: %s", [(check.name, check.residual) for check in checks])
    return checks


def lattice_suite(grid, seed=0):
    """Exterior calculus and Hodge theory identities on random band-limited fields"""
    rng = np.random.default_rng(seed)
    d_squared, adjoint, laplacian, green, neumann = [], [], [], [], []

    for degree in range(DIM + 1):
        field = random_band_limited(grid, degree, rng)
        if degree < DIM - 1:
            d_squared.append(exterior_derivative(exterior_derivative(field)).max_abs())
        if degree > 0:
            lower = random_band_limited(grid, degree - 1, rng)
            left = l2_inner(exterior_derivative(lower), field)
            right = l2_inner(lower, codifferential(field))
            adjoint.append(abs(left - right) / max(1.0, l2_norm(field) * l2_norm(lower)))
        composed = FormField.zeros(grid, degree)
        if degree < DIM:
            composed = composed + codifferential(exterior_derivative(field))
        if degree > 0:
            composed = composed + exterior_derivative(codifferential(field))
        laplacian.append((hodge_laplacian(field) - composed).max_abs())
        _, remainder = harmonic_projection(field)
        green.append((hodge_laplacian(green_inverse(field)) - remainder).max_abs())

    for degree in range(1, DIM):
        exact = exterior_derivative(random_band_limited(grid, degree - 1, rng))
        neumann.append((exterior_derivative(neumann_operator(exact)) - exact).max_abs())

    flat = normal_form()
    structure = structure_fields(FormField.constant(grid, flat.phi), FormField.constant(grid, flat.omega))
    flat_gap = float(np.max(np.abs(structure.normsq - flat.normsq)))

    checks = [
        InvariantCheck("lattice", "d d = 0", _worst(d_squared), 1e-12, len(d_squared)),
        InvariantCheck("lattice", "d* adjoint to d", _worst(adjoint), 1e-10, len(adjoint)),
        InvariantCheck("lattice", "Box = dd* + d*d", _worst(laplacian), 1e-11, len(laplacian)),
        InvariantCheck("lattice", "Box G = 1 - H", _worst(green), 1e-10, len(green)),
        InvariantCheck("lattice", "d N = 1 on exact forms", _worst(neumann), 1e-10, len(neumann)),
        InvariantCheck("lattice", "flat |phi|^2 constant", flat_gap, 1e-14, grid.size),
    ]
    logger.debug("lattice suite on %s: %s", grid, [(check.name, check.residual) for check in checks])
    return checks


def run_suites(grid, samples=DEFAULT_SAMPLES, seed=0):
    """Run both suites; InvariantSuiteError carries the checks when any of them fails"""
    checks = forms6_suite(samples, seed) + lattice_suite(grid, seed)
    failures = [check for check in checks if not check.passed]
    if failures:
        error = InvariantSuiteError(
            f"{len(failures)} invariant check(s) failed: " + ", ".join(check.name for check in failures),
            failed=len(failures),
        )
        error.checks = checks
        raise error
    return checks


def format_table(checks):
    """Fixed-width pass/fail table"""
    widths = [7, 28, 8, 12, 10, 6]
    lines = ["  ".join(title.ljust(width) for title, width in zip(CHECK_COLUMNS, widths))]
    lines.append("  ".join("-" * width for width in widths))
    for check in checks:
        cells = [check.suite, check.name, str(check.samples), f"{check.residual:.3e}", f"{check.tolerance:.0e}",
                 "pass" if check.passed else "FAIL"]
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(cells, widths)))
    return "\n".join(lines)


