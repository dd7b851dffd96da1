"""
gauge - Undo the DeTurck reparametrization of a sampled trajectory.
Tracks the particles of d/dt f_t = -V(t, f_t) from the identity, then pulls the
reparametrized forms back: f_t^* phi(t) follows the primary flow and f_t^* omega(t)
stays at the initial omega.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from errors import StepUnderflowError
from lattice.form_field import FormField, TensorField
from lattice.grid import DIM
from lattice.pointwise import pullback_field
from lattice.spectral import gradient

logger = logging.getLogger(__name__)

INTERPOLATION_ORDERS = {"linear": 1, "cubic": 3}

# Largest particle displacement per substep, in grid cells
PARTICLE_CFL = 0.5

# Points per block of the direct Fourier sum
SPECTRAL_BLOCK = 256


@dataclass
class GaugeResult:
    times: list
    phi: list
    omega: list
    displacement: list
    omega_error: float
    discrepancy: float = None
    reference_time: float = None
    substeps: int = 0
    details: dict = field(default_factory=dict)

    def final_phi(self):
        return self.phi[-1]


class Interpolator:
    """Periodic sampling of grid arrays at arbitrary points"""

    def __init__(self, grid, interpolation="linear"):
        if interpolation not in INTERPOLATION_ORDERS and interpolation != "spectral":
            raise ValueError(f"unknown interpolation '{interpolation}'")
        self.grid = grid
        self.interpolation = interpolation
        self.axes = grid.resolved_axes
        self.reduced_shape = tuple(grid.shape[axis] for axis in self.axes)
        if interpolation == "spectral":
            scale = 2 * math.pi / grid.length
            modes = np.meshgrid(*(np.fft.fftfreq(grid.shape[axis]) * grid.shape[axis] for axis in self.axes), indexing="ij")
            self.wavevectors = scale * np.stack([m.reshape(-1) for m in modes], axis=1)

    def __call__(self, values, positions):
        """values (C, *grid.shape), positions (6, N) -> (C, N)"""
        values = values.reshape((values.shape[0],) + self.reduced_shape)
        if not self.axes:
            return np.repeat(values.reshape(-1, 1), positions.shape[1], axis=1)
        reduced = positions[list(self.axes)]
        if self.interpolation == "spectral":
            return self._spectral(values, reduced)
        spacing = np.array([self.grid.spacing[axis] for axis in self.axes]).reshape(-1, 1)
        coordinates = reduced / spacing
        order = INTERPOLATION_ORDERS[self.interpolation]
        return np.stack([
            ndimage.map_coordinates(component, coordinates, order=order, mode="grid-wrap")
            for component in values
        ])

    def _spectral(self, values, positions):
        axes = tuple(range(1, values.ndim))
        coefficients = np.fft.fftn(values, axes=axes).reshape(values.shape[0], -1) / values[0].size
        result = np.empty((values.shape[0], positions.shape[1]))
        for start in range(0, positions.shape[1], SPECTRAL_BLOCK):
            block = positions[:, start:start + SPECTRAL_BLOCK]
            phases = np.exp(1j * (block.T @ self.wavevectors.T))
            result[:, start:start + SPECTRAL_BLOCK] = np.real(coefficients @ phases.T)
        return result


def _vector_at(interpolate, first, second, weight, positions):
    """V at positions, linear in time between two sampled vector fields"""
    early = interpolate(first.values, positions)
    if weight == 0.0:
        return early
    late = interpolate(second.values, positions)
    return (1.0 - weight) * early + weight * late


def _jacobian(grid, displacement):
    """Df = I + du as a rank-2 field with values[a, b] = d f^a / d x^b"""
    du = gradient(displacement.reshape((DIM,) + grid.shape), grid)
    values = np.einsum("ba...->ab...", du) + np.eye(DIM).reshape((DIM, DIM) + (1,) * DIM)
    return TensorField(grid, values, 2)


def _pull(form, interpolate, positions, jacobian):
    grid = form.grid
    moved = interpolate(form.values, positions).reshape(form.values.shape)
    return pullback_field(FormField(grid, moved, form.degree), jacobian)


def gauge_reconstruct(trajectory, interpolation="linear", reference=None, min_dt=None):
    """Pull the reparametrized trajectory back to the primary flow; optionally compare with a direct run"""
    if not trajectory.has_vectors():
        raise ValueError("gauge reconstruction needs the DeTurck field stored at every sample")
    grid = trajectory.grid
    interpolate = Interpolator(grid, interpolation)
    min_dt = trajectory.config.min_dt if min_dt is None else min_dt
    origin = np.stack([np.broadcast_to(x, grid.shape).reshape(-1) for x in grid.mesh()])
    positions = origin.copy()
    cell = min(grid.spacing[axis] for axis in grid.resolved_axes) if grid.resolved_axes else grid.length

    samples = trajectory.samples
    initial_omega = samples[0].omega
    result = GaugeResult(times=[], phi=[], omega=[], displacement=[], omega_error=0.0)

    for index, sample in enumerate(samples):
        if index > 0:
            previous = samples[index - 1]
            span = sample.time - previous.time
            speed = max(previous.vector.max_abs(), sample.vector.max_abs())
            count = max(1, math.ceil(span * speed / (PARTICLE_CFL * cell)))
            h = span / count
            if 0.0 < h < min_dt:
                raise StepUnderflowError("particle step underflow", time=previous.time, dt=h)
            for step in range(count):
                positions = _particle_step(interpolate, previous, sample, positions, step * h, h, span)
            result.substeps += count

        displacement = positions - origin
        jacobian = _jacobian(grid, displacement)
        pulled_phi = _pull(sample.phi, interpolate, positions, jacobian)
        pulled_omega = _pull(sample.omega, interpolate, positions, jacobian)
        result.times.append(sample.time)
        result.phi.append(pulled_phi)
        result.omega.append(pulled_omega)
        result.displacement.append(TensorField(grid, displacement.reshape((DIM,) + grid.shape), 1))
        result.omega_error = max(result.omega_error, (pulled_omega - initial_omega).max_abs())

    if reference is not None:
        final = result.times[-1]
        match = min(reference.samples, key=lambda candidate: abs(candidate.time - final))
        result.reference_time = match.time
        result.discrepancy = (result.phi[-1] - match.phi).max_abs()
        logger.info("gauge reconstruction differs from the direct run by %.3e at t=%.6g", result.discrepancy, final)
    logger.debug("gauge reconstruction used %d particle substeps", result.substeps)
    return result


def _particle_step(interpolate, previous, sample, positions, offset, h, span):
    """One RK4 step of d/dt f = -V(t, f) inside a sample interval"""

    def velocity(elapsed, points):
        weight = elapsed / span if span > 0 else 0.0
        return -_vector_at(interpolate, previous.vector, sample.vector, weight, points)

    k1 = velocity(offset, positions)
    k2 = velocity(offset + 0.5 * h, positions + 0.5 * h * k1)
    k3 = velocity(offset + 0.5 * h, positions + 0.5 * h * k2)
    k4 = velocity(offset + h, positions + h * k3)
    return positions + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
