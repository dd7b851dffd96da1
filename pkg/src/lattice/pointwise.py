"""
pointwise - Pointwise algebra of fields and field generators.
Kernels that expand full antisymmetric tensors run over chunks of grid points
(threaded when IIA_THREADS > 1); linear component maps are applied in one einsum.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from config import CHUNK_SIZE, kernel_threads
from errors import DegenerateError
from forms6 import kernels
from forms6.multi_index import contraction_table, dimension, interior_table, star_table, wedge_table
from lattice.form_field import FormField, TensorField, from_points, inverse
from lattice.grid import DIM

logger = logging.getLogger(__name__)


def _concatenate(results):
    first = results[0]
    if isinstance(first, dict):
        return {key: np.concatenate([part[key] for part in results]) for key in first}
    if isinstance(first, tuple):
        return tuple(np.concatenate(parts) for parts in zip(*results))
    return np.concatenate(results)


def map_points(kernel, *arrays):
    """Apply kernel to point-major arrays (N, ...) chunk by chunk and stitch the results"""
    count = arrays[0].shape[0]
    starts = list(range(0, count, CHUNK_SIZE))

    def run(start):
        return kernel(*(array[start:start + CHUNK_SIZE] for array in arrays))

    threads = kernel_threads()
    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(start) for start in starts]
    return _concatenate(results)


@dataclass
class FieldStructure:
    """Derived Type IIA data of a pair of fields, all sampled on the grid"""

    j: TensorField
    lam: np.ndarray
    phihat: FormField
    normsq: np.ndarray
    metric: TensorField
    inverse_metric: TensorField
    inverse_omega: TensorField
    min_eigenvalue: np.ndarray
    positive: np.ndarray

    def first_failure(self):
        """Grid index of the first non-positive point, or None"""
        bad = np.argwhere(~self.positive)
        return tuple(int(i) for i in bad[0]) if bad.size else None


def _structure_kernel(phi, omega):
    data = kernels.structure(phi, omega)
    with np.errstate(invalid="ignore"):
        data["inverse_metric"] = np.linalg.inv(np.where(data["positive"][:, None, None], data["metric"], np.eye(DIM)))
    return data


def structure_fields(phi, omega):
    """J, phihat, |phi|^2, g, g^-1 and positivity of a pair of fields, without raising"""
    grid = phi.grid
    data = map_points(_structure_kernel, phi.points(), omega.points())
    return FieldStructure(
        j=TensorField(grid, from_points(np.nan_to_num(data["j"]), grid), 2),
        lam=from_points(data["lam"], grid),
        phihat=FormField(grid, from_points(data["phihat"], grid), 3),
        normsq=from_points(data["normsq"], grid),
        metric=TensorField(grid, from_points(data["metric"], grid), 2),
        inverse_metric=TensorField(grid, from_points(data["inverse_metric"], grid), 2),
        inverse_omega=TensorField(grid, from_points(data["inverse_omega"], grid), 2),
        min_eigenvalue=from_points(data["min_eigenvalue"], grid),
        positive=from_points(data["positive"], grid),
    )


def require_positive(phi, omega, time=None, stage=None):
    """structure_fields, raising DegenerateError at the first point where positivity fails"""
    try:
        structure = structure_fields(phi, omega)
    except np.linalg.LinAlgError as exc:
        raise DegenerateError("omega is degenerate somewhere on the grid", time=time, stage=stage) from exc
    location = structure.first_failure()
    if location is not None:
        raise DegenerateError(
            "positivity lost",
            location=location,
            time=time,
            stage=stage,
            lam=float(structure.lam[location]),
            min_eigenvalue=float(structure.min_eigenvalue[location]),
        )
    return structure


def wedge_fields(a, b):
    values = np.einsum("i...,j...,ijk->k...", a.values, b.values, wedge_table(a.degree, b.degree))
    return FormField(a.grid, values, a.degree + b.degree)


def wedge_constant(form, field):
    """Constant AltTensor wedged with a field"""
    values = np.einsum("i,j...,ijk->k...", form.components, field.values, wedge_table(form.degree, field.degree))
    return FormField(field.grid, values, form.degree + field.degree)


def interior_field(vector, a):
    """iota_V a for a vector field V (rank-1 TensorField)"""
    values = np.einsum("i...,J...,iJI->I...", vector.values, a.values, interior_table(a.degree))
    return FormField(a.grid, values, a.degree - 1)


def lambda_field(inverse_omega, a):
    """Symplectic contraction with omega^{ij} given as a rank-2 TensorField"""
    values = 0.5 * np.einsum("ij...,ijJI,J...->I...", inverse_omega.values, contraction_table(a.degree), a.values)
    return FormField(a.grid, values, a.degree - 2)


def scale_field(function, a):
    """Multiply a form field by a scalar function on the grid"""
    return a.with_values(a.values * function[None])


def flat_star_field(a):
    """Hodge star of the flat coordinate metric"""
    values = np.einsum("I...,IJ->J...", a.values, star_table(a.degree))
    return FormField(a.grid, values, DIM - a.degree)


def pullback_field(a, matrices):
    """Pointwise pullback of a form field by a field of linear maps (rank-2 TensorField)"""
    points = map_points(
        lambda comps, mats: kernels.pullback(comps, mats, a.degree),
        a.points(),
        matrices.points(),
    )
    return FormField(a.grid, from_points(points, a.grid), a.degree)


def lefschetz_field(omega, gamma):
    """Pointwise solve of omega ^ lambda = gamma for 2-form fields lambda"""
    try:
        points = map_points(kernels.lefschetz_solve, omega.points(), gamma.points())
    except np.linalg.LinAlgError as exc:
        raise DegenerateError("Lefschetz map is singular somewhere on the grid") from exc
    return FormField(omega.grid, from_points(points, omega.grid), 2)


def primitivity_max(phi, omega):
    """Pointwise max of |phi ^ omega|"""
    return wedge_fields(phi, omega).max_abs()


def trig_field(grid, form, frequency, amplitude=1.0, kind="sin"):
    """amplitude * sin(k.x) * form (or cos), k = 2 pi frequency / L"""
    phase = sum(2 * np.pi * m / grid.length * x for m, x in zip(frequency, grid.mesh()))
    wave = np.sin(phase) if kind == "sin" else np.cos(phase)
    wave = np.broadcast_to(wave, grid.shape)
    values = amplitude * form.components.reshape((-1,) + (1,) * DIM) * wave[None]
    return FormField(grid, values, form.degree)


def random_band_limited(grid, degree, rng, max_mode=1, amplitude=1.0):
    """Random real field whose modes satisfy |m_a| <= max_mode on every axis"""
    mask = np.ones(grid.spectrum_shape, dtype=bool)
    for modes in grid.integer_modes:
        mask = mask & (np.abs(modes) <= max_mode)
    mask = mask & grid.dealias_mask
    shape = (dimension(degree),) + grid.spectrum_shape
    spectrum = (rng.normal(size=shape) + 1j * rng.normal(size=shape)) * mask[None]
    values = inverse(spectrum, grid)
    scale = np.max(np.abs(values))
    if scale > 0:
        values = values * (amplitude / scale)
    logger.debug("random band-limited degree-%d field, max mode %d", degree, max_mode)
    return FormField(grid, values, degree)
