"""
FormField - k-forms, harmonic parts and general tensors sampled on a periodic grid.
Values are stored component-major: (C(6,k), *grid.shape) for forms and (6,)*rank + grid.shape
for tensors. The Fourier spectrum of a form is cached on first use.
"""
from dataclasses import dataclass

import numpy as np
import scipy.fft

from config import kernel_threads
from forms6 import AltTensor
from forms6.multi_index import dimension, position
from lattice.grid import AXES, DIM


def forward(values):
    """Real FFT over the six trailing spatial axes"""
    return scipy.fft.rfftn(values, axes=AXES, workers=kernel_threads())


def inverse(spectrum, grid):
    return scipy.fft.irfftn(spectrum, s=grid.shape, axes=AXES, workers=kernel_threads())


class FormField:
    """A real k-form on the grid with a lazily cached spectrum"""

    def __init__(self, grid, values, degree):
        values = np.asarray(values, dtype=float)
        expected = (dimension(degree),) + grid.shape
        if values.shape != expected:
            raise ValueError(f"degree-{degree} field on {grid} needs shape {expected}, got {values.shape}")
        self.grid = grid
        self.values = values
        self.degree = degree
        self._spectrum = None

    @classmethod
    def zeros(cls, grid, degree):
        return cls(grid, np.zeros((dimension(degree),) + grid.shape), degree)

    @classmethod
    def constant(cls, grid, form):
        """Field equal to the AltTensor `form` at every point"""
        values = np.broadcast_to(form.components.reshape((-1,) + (1,) * DIM), (form.components.size,) + grid.shape)
        return cls(grid, np.array(values), form.degree)

    @classmethod
    def from_spectrum(cls, grid, spectrum, degree):
        field = cls(grid, inverse(spectrum, grid), degree)
        field._spectrum = spectrum
        return field

    @property
    def spectrum(self):
        if self._spectrum is None:
            self._spectrum = forward(self.values)
        return self._spectrum

    def points(self):
        """(points, components) view for pointwise kernels"""
        return self.values.reshape(self.values.shape[0], -1).T

    def at(self, index):
        """The AltTensor at a grid multi-index"""
        return AltTensor(self.values[(slice(None),) + tuple(index)], self.degree)

    def component(self, *labels):
        """Component field for 1-based increasing labels, e.g. component(1, 3, 5)"""
        return self.values[position(self.degree)[tuple(label - 1 for label in labels)]]

    def max_abs(self):
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def mean(self):
        """Harmonic (constant) part"""
        return CohomologyVector(self.values.reshape(self.values.shape[0], -1).mean(axis=1), self.degree)

    def with_values(self, values):
        return FormField(self.grid, values, self.degree)

    def _check(self, other):
        if not isinstance(other, FormField) or other.degree != self.degree or not self.grid.same_as(other.grid):
            raise ValueError("fields must share degree and grid")

    def __add__(self, other):
        self._check(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return self.with_values(self.values - other.values)

    def __neg__(self):
        return self.with_values(-self.values)

    def __mul__(self, scalar):
        return self.with_values(self.values * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self.with_values(self.values / float(scalar))

    def __repr__(self):
        return f"FormField(degree={self.degree}, {self.grid})"


@dataclass(frozen=True, eq=False)
class CohomologyVector:
    """Constant-coefficient harmonic part of a k-form on the torus"""

    constants: np.ndarray
    degree: int

    def __post_init__(self):
        constants = np.array(self.constants, dtype=float).reshape(-1)
        if constants.size != dimension(self.degree):
            raise ValueError(f"degree {self.degree} needs {dimension(self.degree)} constants")
        constants.flags.writeable = False
        object.__setattr__(self, "constants", constants)

    @classmethod
    def from_form(cls, form):
        return cls(form.components, form.degree)

    def as_form(self):
        return AltTensor(self.constants, self.degree)

    def to_field(self, grid):
        return FormField.constant(grid, self.as_form())

    def max_abs(self):
        return float(np.max(np.abs(self.constants)))

    def __sub__(self, other):
        return CohomologyVector(self.constants - other.constants, self.degree)

    def __add__(self, other):
        return CohomologyVector(self.constants + other.constants, self.degree)


class TensorField:
    """Rank-r tensor with values (6,)*rank + grid.shape: vectors, metrics, endomorphisms, Christoffels"""

    def __init__(self, grid, values, rank):
        values = np.asarray(values, dtype=float)
        expected = (DIM,) * rank + grid.shape
        if values.shape != expected:
            raise ValueError(f"rank-{rank} tensor field on {grid} needs shape {expected}, got {values.shape}")
        self.grid = grid
        self.values = values
        self.rank = rank

    @classmethod
    def constant(cls, grid, tensor):
        tensor = np.asarray(tensor, dtype=float)
        values = np.broadcast_to(tensor.reshape(tensor.shape + (1,) * DIM), tensor.shape + grid.shape)
        return cls(grid, np.array(values), tensor.ndim)

    @classmethod
    def zeros(cls, grid, rank):
        return cls(grid, np.zeros((DIM,) * rank + grid.shape), rank)

    def points(self):
        """(points, 6, ..., 6) view"""
        return np.moveaxis(self.values.reshape((DIM,) * self.rank + (-1,)), -1, 0)

    def at(self, index):
        return self.values[(Ellipsis,) + tuple(index)]

    def max_abs(self):
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def pointwise_norm(self):
        """Frobenius norm at every point"""
        return np.sqrt(np.sum(self.values ** 2, axis=tuple(range(self.rank))))

    def __repr__(self):
        return f"TensorField(rank={self.rank}, {self.grid})"


def from_points(points, grid):
    """Inverse of FormField.points / TensorField.points: (N, *tail) -> (*tail, *grid.shape)"""
    tail = points.shape[1:]
    return np.moveaxis(points, 0, -1).reshape(tail + grid.shape)
