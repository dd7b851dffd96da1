"""
spectral - Exterior calculus and Hodge theory on T^6 by Fourier differentiation.
All operators act against the flat coordinate metric. d and d* share the derivative
wavenumbers of the Laplacian symbol, so dd* + d*d equals the Laplacian on the grid.
"""
import itertools
import logging
import math

import numpy as np

from errors import NotExactError
from forms6.multi_index import dimension, interior_table, wedge_table
from lattice.form_field import FormField, forward, inverse
from lattice.grid import DIM

logger = logging.getLogger(__name__)

# Share of field energy outside the 2/3 band that triggers an aliasing warning
ALIASING_THRESHOLD = 1e-8

# Tolerance of the exactness checks in the Neumann operator
EXACTNESS_TOLERANCE = 1e-10


def _ik(grid):
    return [1j * k for k in grid.derivative_wavenumbers]


def aliasing_fraction(field):
    """Fraction of the spectral energy outside the 2/3 band"""
    grid = field.grid
    power = np.abs(field.spectrum) ** 2 * grid.half_spectrum_weights[None]
    total = float(power.sum())
    if total == 0.0:
        return 0.0
    return float(power[:, ~grid.dealias_mask].sum()) / total


def check_aliasing(field, label="field"):
    fraction = aliasing_fraction(field)
    if fraction > ALIASING_THRESHOLD:
        logger.warning("%s carries %.3g of its energy in the top third of the spectrum", label, fraction)
    return fraction


def dealias(field):
    """2/3-rule filter"""
    spectrum = field.spectrum * field.grid.dealias_mask[None]
    return FormField.from_spectrum(field.grid, spectrum, field.degree)


def partial_derivative(values, grid, axis):
    """Spectral derivative along one axis of any (..., *grid.shape) array"""
    spectrum = forward(values)
    return inverse(spectrum * (1j * grid.derivative_wavenumbers[axis]), grid)


def gradient(values, grid):
    """(6, ...) stack of spectral first derivatives"""
    spectrum = forward(values)
    return np.stack([inverse(spectrum * ik, grid) for ik in _ik(grid)])


def second_derivative(values, grid, first, second):
    spectrum = forward(values)
    ik = _ik(grid)
    return inverse(spectrum * ik[first] * ik[second], grid)


def exterior_derivative(field):
    """d on a k-form field, k <= 5"""
    if field.degree >= DIM:
        raise ValueError("exterior derivative of a top-degree form")
    grid = field.grid
    check_aliasing(field, f"degree-{field.degree} field")
    table = wedge_table(1, field.degree)
    spectrum = np.zeros((dimension(field.degree + 1),) + grid.spectrum_shape, dtype=complex)
    for axis, ik in enumerate(_ik(grid)):
        if grid.shape[axis] == 1:
            continue
        spectrum += np.einsum("JK,J...->K...", table[axis], field.spectrum) * ik
    return FormField.from_spectrum(grid, spectrum, field.degree + 1)


def codifferential(field):
    """d* = -sum_p iota_{e_p} d_p on a k-form field, k >= 1"""
    if field.degree < 1:
        raise ValueError("codifferential of a function")
    grid = field.grid
    check_aliasing(field, f"degree-{field.degree} field")
    table = interior_table(field.degree)
    spectrum = np.zeros((dimension(field.degree - 1),) + grid.spectrum_shape, dtype=complex)
    for axis, ik in enumerate(_ik(grid)):
        if grid.shape[axis] == 1:
            continue
        spectrum -= np.einsum("JI,J...->I...", table[axis], field.spectrum) * ik
    return FormField.from_spectrum(grid, spectrum, field.degree - 1)


def hodge_laplacian(field):
    """Componentwise Laplacian with symbol |k|^2"""
    spectrum = field.spectrum * field.grid.laplacian_symbol[None]
    return FormField.from_spectrum(field.grid, spectrum, field.degree)


def harmonic_projection(field):
    """(zero mode, remainder)"""
    harmonic = field.mean()
    return harmonic, field - harmonic.to_field(field.grid)


def green_inverse(field):
    """Inverse Laplacian on the complement of the harmonic part"""
    symbol = field.grid.laplacian_symbol
    with np.errstate(divide="ignore", invalid="ignore"):
        multiplier = np.where(symbol > 0, 1.0 / np.where(symbol > 0, symbol, 1.0), 0.0)
    return FormField.from_spectrum(field.grid, field.spectrum * multiplier[None], field.degree)


def neumann_operator(field, tolerance=EXACTNESS_TOLERANCE):
    """d* of the Green operator: a coexact potential gamma with d gamma = field for exact fields"""
    if field.degree < 1:
        raise ValueError("a function is never exact")
    scale = max(1.0, field.max_abs())
    harmonic = field.mean().max_abs()
    if harmonic > tolerance * scale:
        raise NotExactError("form has a harmonic part", harmonic=harmonic)
    if field.degree < DIM:
        closedness = exterior_derivative(field).max_abs()
        if closedness > tolerance * scale:
            raise NotExactError("form is not closed", closedness=closedness)
    return codifferential(green_inverse(field))


def l2_inner(first, second):
    """Quadrature L^2 pairing with the (1/k!) component normalization"""
    return float(first.grid.cell_volume * np.sum(first.values * second.values))


def l2_norm(field):
    return math.sqrt(max(l2_inner(field, field), 0.0))


def sobolev_norm(field, order):
    """W^{order,2} norm with Fourier weight (1 + |k|^2)^order"""
    if order < 0:
        raise ValueError("Sobolev order must be non-negative")
    grid = field.grid
    weight = (1.0 + grid.full_symbol) ** order * grid.half_spectrum_weights
    power = np.sum(np.abs(field.spectrum) ** 2, axis=0)
    total = grid.volume / grid.size ** 2 * float(np.sum(weight * power))
    return math.sqrt(max(total, 0.0))


def derivative_energy(field, order):
    """Integral of |nabla^order f|^2 (coordinate derivatives, all index orders counted)"""
    grid = field.grid
    weight = grid.laplacian_symbol ** order * grid.half_spectrum_weights
    power = np.sum(np.abs(field.spectrum) ** 2, axis=0)
    return grid.volume / grid.size ** 2 * float(np.sum(weight * power))


def ck_norm(field, order):
    """Grid sup of spectral derivatives up to the given order"""
    grid = field.grid
    best = field.max_abs()
    spectrum = field.spectrum
    ik = _ik(grid)
    for level in range(1, order + 1):
        for axes in itertools.combinations_with_replacement(grid.resolved_axes, level):
            multiplier = np.ones(grid.spectrum_shape, dtype=complex)
            for axis in axes:
                multiplier = multiplier * ik[axis]
            values = inverse(spectrum * multiplier[None], grid)
            best = max(best, float(np.max(np.abs(values))))
    return best


def dealias_values(values, grid):
    """2/3-rule filter of any (..., *grid.shape) array"""
    return inverse(forward(values) * grid.dealias_mask, grid)


def vector_l2_norm(vector):
    """Coordinate L^2 norm of a rank-1 tensor field"""
    return math.sqrt(vector.grid.cell_volume * float(np.sum(vector.values ** 2)))
