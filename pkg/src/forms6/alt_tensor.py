"""
AltTensor - Antisymmetric tensors at a point of a 6-dimensional space.
Follows Single Responsibility Principle - only holds components and applies the
basic exterior-algebra operations; Type IIA structure lives in structure.py.
"""
from dataclasses import dataclass

import numpy as np

from errors import NotPositiveError
from forms6 import kernels
from forms6.multi_index import DIM, dimension, full_tensor, position, sort_with_sign


@dataclass(frozen=True, eq=False)
class AltTensor:
    """k-form with components on increasing multi-indices (lexicographic order)"""

    components: np.ndarray
    degree: int

    def __post_init__(self):
        values = np.array(self.components, dtype=float).reshape(-1)
        if values.shape[0] != dimension(self.degree):
            raise ValueError(
                f"degree {self.degree} needs {dimension(self.degree)} components, got {values.shape[0]}"
            )
        values.flags.writeable = False
        object.__setattr__(self, "components", values)

    @classmethod
    def zeros(cls, degree):
        return cls(np.zeros(dimension(degree)), degree)

    @classmethod
    def basis(cls, *labels):
        """Basis form from 1-based labels, e.g. basis(1, 3, 5) is e^135"""
        return cls.from_dict({tuple(labels): 1.0})

    @classmethod
    def from_dict(cls, terms, degree=None):
        """Build from {(1-based labels): coefficient}; unsorted labels pick up their sign"""
        if degree is None:
            degree = len(next(iter(terms)))
        values = np.zeros(dimension(degree))
        slots = position(degree)
        for labels, coefficient in terms.items():
            if len(labels) != degree:
                raise ValueError(f"multi-index {labels} does not have length {degree}")
            if any(not 1 <= label <= DIM for label in labels):
                raise ValueError(f"labels must lie in 1..{DIM}, got {labels}")
            ordered, sign = sort_with_sign(label - 1 for label in labels)
            if sign:
                values[slots[ordered]] += sign * coefficient
        return cls(values, degree)

    def full(self):
        """Fully antisymmetric (6, ..., 6) array"""
        return full_tensor(self.components, self.degree)

    def max_abs(self):
        return float(np.max(np.abs(self.components))) if self.components.size else 0.0

    def _check_degree(self, other):
        if not isinstance(other, AltTensor) or other.degree != self.degree:
            raise ValueError("forms of different degree cannot be added")

    def __add__(self, other):
        self._check_degree(other)
        return AltTensor(self.components + other.components, self.degree)

    def __sub__(self, other):
        self._check_degree(other)
        return AltTensor(self.components - other.components, self.degree)

    def __neg__(self):
        return AltTensor(-self.components, self.degree)

    def __mul__(self, scalar):
        return AltTensor(self.components * float(scalar), self.degree)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return AltTensor(self.components / float(scalar), self.degree)

    def __repr__(self):
        terms = [
            f"{value:+.6g} e^{''.join(str(i + 1) for i in index)}"
            for index, value in zip(position(self.degree), self.components)
            if value != 0.0
        ]
        return f"AltTensor({self.degree}: {' '.join(terms) or '0'})"


@dataclass(frozen=True, eq=False)
class Metric6:
    """Symmetric 6x6 matrix g_ij"""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.shape != (DIM, DIM):
            raise ValueError(f"metric must be {DIM}x{DIM}, got {entries.shape}")
        if not np.allclose(entries, entries.T, atol=1e-10 * max(1.0, np.abs(entries).max())):
            raise ValueError("metric is not symmetric")
        entries = 0.5 * (entries + entries.T)
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    @classmethod
    def identity(cls):
        return cls(np.eye(DIM))

    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh(self.entries)[0])

    def is_positive(self):
        return self.min_eigenvalue() > kernels.EIGENVALUE_THRESHOLD

    def inverse(self):
        return np.linalg.inv(self.entries)

    def lower(self, vector):
        """v -> g(v, .)"""
        return AltTensor(self.entries @ np.asarray(vector, dtype=float), 1)


@dataclass(frozen=True, eq=False)
class AcStructure:
    """Almost-complex structure J^i_j with J^2 = -1"""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        if matrix.shape != (DIM, DIM):
            raise ValueError(f"almost-complex structure must be {DIM}x{DIM}, got {matrix.shape}")
        scale = max(1.0, np.abs(matrix).max()) ** 2
        if not np.allclose(matrix @ matrix, -np.eye(DIM), atol=1e-10 * scale):
            raise ValueError("J^2 is not -1")
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def standard(cls):
        """J e_{2k-1} = e_{2k}, J e_{2k} = -e_{2k-1}"""
        matrix = np.zeros((DIM, DIM))
        for block in range(0, DIM, 2):
            matrix[block + 1, block] = 1.0
            matrix[block, block + 1] = -1.0
        return cls(matrix)

    def square_residual(self):
        return float(np.max(np.abs(self.matrix @ self.matrix + np.eye(DIM))))


def wedge(a, b):
    if a.degree + b.degree > DIM:
        raise ValueError(f"wedge of degrees {a.degree} and {b.degree} overflows dimension {DIM}")
    return AltTensor(kernels.wedge(a.components, a.degree, b.components, b.degree), a.degree + b.degree)


def interior_product(v, a):
    """iota_v a"""
    if a.degree < 1:
        raise ValueError("interior product needs a form of degree >= 1")
    return AltTensor(kernels.interior(np.asarray(v, dtype=float), a.components, a.degree), a.degree - 1)


def pullback(a, matrix):
    """(A^* a)(X1..Xk) = a(A X1, .., A Xk)"""
    return AltTensor(kernels.pullback(a.components, np.asarray(matrix, dtype=float), a.degree), a.degree)


def j_action(j, a):
    """(J a)(X1..Xk) = a(J X1, .., J Xk)"""
    return pullback(a, j.matrix)


def lambda_contraction(omega, a):
    """Lambda_omega a, the symplectic trace"""
    if a.degree < 2:
        raise ValueError("symplectic contraction needs a form of degree >= 2")
    inverse = kernels.symplectic_inverse(omega.components)
    return AltTensor(kernels.contract_lambda(inverse, a.components, a.degree), a.degree - 2)


def hodge_star(g, a):
    if not g.is_positive():
        raise NotPositiveError("Hodge star needs a positive definite metric", min_eigenvalue=g.min_eigenvalue())
    return AltTensor(kernels.hodge_star(a.components, g.entries, a.degree), DIM - a.degree)


def inner_product(g, a, b):
    """(1/k!)-normalized inner product (a, b)_g"""
    if a.degree != b.degree:
        raise ValueError("inner product of forms of different degree")
    return float(kernels.inner(a.components, b.components, g.inverse(), a.degree))
