"""
Grid - Represents the periodic sampling of the flat torus T^6 and its Fourier dual.
Follows Single Responsibility Principle - only handles grid geometry and wavenumbers.
"""
import math
from functools import cached_property

import numpy as np

from config import max_points
from errors import ConfigError

DIM = 6
AXES = tuple(range(-DIM, 0))


def _is_power_of_two(value):
    return value >= 1 and value & (value - 1) == 0


class Grid:
    """Handles the grid structure of T^6 and basic queries.

    `n` is the nominal resolution; `shape` may lower individual axes (a length-1
    axis means every field is constant along it).
    """

    def __init__(self, n, length=2 * math.pi, shape=None):
        if not isinstance(n, (int, np.integer)) or n < 4 or not _is_power_of_two(int(n)):
            raise ConfigError("grid resolution must be a power of two >= 4", n=n)
        if length <= 0:
            raise ConfigError("torus period must be positive", length=length)
        shape = tuple(int(size) for size in (shape or (n,) * DIM))
        if len(shape) != DIM or any(not _is_power_of_two(size) or size > n for size in shape):
            raise ConfigError("grid shape needs six powers of two not above n", shape=shape, n=n)
        size = math.prod(shape)
        if size > max_points():
            raise ConfigError("grid exceeds the memory cap", points=size, cap=max_points())
        self.n = int(n)
        self.length = float(length)
        self.shape = shape

    @property
    def size(self):
        """Number of grid points"""
        return math.prod(self.shape)

    @property
    def volume(self):
        return self.length ** DIM

    @property
    def cell_volume(self):
        return self.volume / self.size

    @property
    def spacing(self):
        return tuple(self.length / size for size in self.shape)

    @property
    def resolved_axes(self):
        """Axes along which fields may vary"""
        return tuple(axis for axis, size in enumerate(self.shape) if size > 1)

    @property
    def spectrum_shape(self):
        return self.shape[:-1] + (self.shape[-1] // 2 + 1,)

    def coordinates(self, axis):
        """Sample positions along one axis, broadcastable against the grid shape"""
        values = np.arange(self.shape[axis]) * self.spacing[axis]
        return values.reshape([-1 if a == axis else 1 for a in range(DIM)])

    def mesh(self):
        return [self.coordinates(axis) for axis in range(DIM)]

    def _modes(self, axis):
        size = self.shape[axis]
        if axis == DIM - 1:
            modes = np.fft.rfftfreq(size) * size
        else:
            modes = np.fft.fftfreq(size) * size
        return modes

    def _broadcast(self, axis, values):
        return values.reshape([-1 if a == axis else 1 for a in range(DIM)])

    @cached_property
    def integer_modes(self):
        """Signed integer mode numbers per axis, broadcastable against the spectrum"""
        return tuple(self._broadcast(axis, self._modes(axis)) for axis in range(DIM))

    @cached_property
    def wavenumbers(self):
        """Full wavenumbers 2 pi m / L, Nyquist kept (used by norms)"""
        scale = 2 * math.pi / self.length
        return tuple(scale * modes for modes in self.integer_modes)

    @cached_property
    def derivative_wavenumbers(self):
        """Wavenumbers for spectral derivatives; the Nyquist mode is zeroed"""
        result = []
        for axis, k in enumerate(self.wavenumbers):
            size = self.shape[axis]
            modes = self.integer_modes[axis]
            if size % 2 == 0:
                k = np.where(np.abs(modes) == size // 2, 0.0, k)
            result.append(k)
        return tuple(result)

    @cached_property
    def laplacian_symbol(self):
        """|k|^2 with derivative wavenumbers, so the Laplacian matches dd* + d*d exactly"""
        return sum(k ** 2 for k in self.derivative_wavenumbers)

    @cached_property
    def full_symbol(self):
        return sum(k ** 2 for k in self.wavenumbers)

    @cached_property
    def dealias_mask(self):
        """2/3 rule: keep |m_a| <= n_a / 3 on every axis"""
        mask = np.ones(self.spectrum_shape, dtype=bool)
        for axis, modes in enumerate(self.integer_modes):
            mask = mask & (np.abs(modes) <= self.shape[axis] / 3.0)
        return mask

    @cached_property
    def half_spectrum_weights(self):
        """Multiplicity of each stored rfft mode in the full spectrum (Parseval weights)"""
        size = self.shape[-1]
        weights = np.full(self.spectrum_shape[-1], 2.0)
        weights[0] = 1.0
        if size % 2 == 0:
            weights[-1] = 1.0
        return self._broadcast(DIM - 1, weights)

    @property
    def max_symbol(self):
        """Largest eigenvalue of the Laplacian on the grid"""
        return float(np.max(self.laplacian_symbol))

    @property
    def min_positive_symbol(self):
        """Smallest positive eigenvalue of the Laplacian on the grid"""
        symbol = self.laplacian_symbol
        positive = symbol[symbol > 0]
        return float(positive.min()) if positive.size else 0.0

    def same_as(self, other):
        return self.n == other.n and self.length == other.length and self.shape == other.shape

    def __eq__(self, other):
        return isinstance(other, Grid) and self.same_as(other)

    def __hash__(self):
        return hash((self.n, self.length, self.shape))

    def __repr__(self):
        return f"Grid(n={self.n}, length={self.length:.6g}, shape={self.shape})"

    def copy(self):
        """Create a copy of the grid"""
        return Grid(self.n, self.length, self.shape)
