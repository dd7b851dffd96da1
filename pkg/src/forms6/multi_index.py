"""
multi_index - Strictly increasing multi-index bookkeeping for forms on a 6-dimensional space.
Components of a k-form are stored in lexicographic order of their increasing multi-indices;
every table below maps between that storage and the sign rules of the exterior algebra.
Indices are 0-based internally; the public constructors in alt_tensor accept the 1-based
labels used on paper (e^135 and so on).
"""
from functools import lru_cache
from itertools import combinations, permutations
from math import comb

import numpy as np

DIM = 6


def dimension(k):
    """Number of independent components of a k-form"""
    if not 0 <= k <= DIM:
        raise ValueError(f"form degree must lie in 0..{DIM}, got {k}")
    return comb(DIM, k)


@lru_cache(maxsize=None)
def basis(k):
    """Increasing multi-indices of length k in storage order"""
    dimension(k)
    return tuple(combinations(range(DIM), k))


@lru_cache(maxsize=None)
def position(k):
    """Map from increasing multi-index to storage position"""
    return {index: pos for pos, index in enumerate(basis(k))}


def sort_with_sign(sequence):
    """Sort an index sequence, returning (sorted tuple, permutation sign); sign 0 on repeats"""
    sequence = tuple(sequence)
    if len(set(sequence)) != len(sequence):
        return tuple(sorted(sequence)), 0
    inversions = sum(
        1
        for a in range(len(sequence))
        for b in range(a + 1, len(sequence))
        if sequence[a] > sequence[b]
    )
    return tuple(sorted(sequence)), (-1) ** inversions


@lru_cache(maxsize=None)
def wedge_table(p, q):
    """W[I, J, K] with e^I ^ e^J = sum_K W[I, J, K] e^K"""
    if p + q > DIM:
        raise ValueError(f"wedge of degrees {p} and {q} overflows dimension {DIM}")
    table = np.zeros((dimension(p), dimension(q), dimension(p + q)))
    target = position(p + q)
    for i, left in enumerate(basis(p)):
        for j, right in enumerate(basis(q)):
            merged, sign = sort_with_sign(left + right)
            if sign:
                table[i, j, target[merged]] = sign
    table.flags.writeable = False
    return table


@lru_cache(maxsize=None)
def interior_table(k):
    """T[i, J, I] with (iota_{e_i} e^J) = sum_I T[i, J, I] e^I"""
    if k < 1:
        raise ValueError("interior product needs a form of degree >= 1")
    table = np.zeros((DIM, dimension(k), dimension(k - 1)))
    source = position(k)
    for pos, rest in enumerate(basis(k - 1)):
        for i in range(DIM):
            merged, sign = sort_with_sign((i,) + rest)
            if sign:
                table[i, source[merged], pos] = sign
    table.flags.writeable = False
    return table


@lru_cache(maxsize=None)
def contraction_table(k):
    """C[i, j, J, I] with A_{j i I} = sum_J C[i, j, J, I] a_J for the k-form a"""
    if k < 2:
        raise ValueError("symplectic contraction needs a form of degree >= 2")
    table = np.zeros((DIM, DIM, dimension(k), dimension(k - 2)))
    source = position(k)
    for pos, rest in enumerate(basis(k - 2)):
        for i in range(DIM):
            for j in range(DIM):
                merged, sign = sort_with_sign((j, i) + rest)
                if sign:
                    table[i, j, source[merged], pos] = sign
    table.flags.writeable = False
    return table


@lru_cache(maxsize=None)
def star_table(k):
    """S[I, Ic] with the Euclidean star e^I -> sign(I, Ic) e^Ic"""
    table = np.zeros((dimension(k), dimension(DIM - k)))
    target = position(DIM - k)
    for pos, index in enumerate(basis(k)):
        complement = tuple(i for i in range(DIM) if i not in index)
        _, sign = sort_with_sign(index + complement)
        table[pos, target[complement]] = sign
    table.flags.writeable = False
    return table


@lru_cache(maxsize=None)
def expansion_plan(k):
    """Flat positions, source components and signs to expand components into a full tensor"""
    flat, src, signs = [], [], []
    for pos, index in enumerate(basis(k)):
        for perm in permutations(index):
            _, sign = sort_with_sign(perm)
            flat.append(int(np.ravel_multi_index(perm, (DIM,) * k)) if k else 0)
            src.append(pos)
            signs.append(sign)
    return np.array(flat, dtype=np.intp), np.array(src, dtype=np.intp), np.array(signs, dtype=float)


@lru_cache(maxsize=None)
def sorted_positions(k):
    """Flat positions of the increasing multi-indices inside a full tensor"""
    if k == 0:
        return np.zeros(1, dtype=np.intp)
    return np.array([np.ravel_multi_index(index, (DIM,) * k) for index in basis(k)], dtype=np.intp)


def full_tensor(components, k):
    """Expand (..., C(6,k)) components into a (..., 6, ..., 6) antisymmetric tensor"""
    components = np.asarray(components)
    flat, src, signs = expansion_plan(k)
    full = np.zeros(components.shape[:-1] + (DIM ** k,), dtype=components.dtype)
    full[..., flat] = components[..., src] * signs
    return full.reshape(components.shape[:-1] + (DIM,) * k)


def compress(full, k):
    """Read the increasing-multi-index components off a (..., 6, ..., 6) tensor"""
    full = np.asarray(full)
    lead = full.shape[:full.ndim - k]
    return full.reshape(lead + (DIM ** k,))[..., sorted_positions(k)]


def compound(matrix, k):
    """k-th compound matrix: (..., 6, 6) -> (..., C(6,k), C(6,k)) of k x k minors"""
    matrix = np.asarray(matrix)
    lead = matrix.shape[:-2]
    if k == 0:
        return np.ones(lead + (1, 1), dtype=matrix.dtype)
    if k == 1:
        return matrix
    rows = np.array(basis(k))
    sub = matrix[..., rows[:, None, :, None], rows[None, :, None, :]]
    return np.linalg.det(sub)


@lru_cache(maxsize=None)
def hitchin_table():
    """Q[i, j, A, B] with K(phi)^i_j = sum Q[i, j, A, B] phi_A phi_B

    K(X) = -1/2 w where iota_w e^123456 = iota_X phi ^ phi.
    """
    interior = interior_table(3)
    wedge = wedge_table(2, 3)
    five = np.einsum("jAI,IBM->jABM", interior, wedge)
    top = position(5)
    table = np.zeros((DIM, DIM, dimension(3), dimension(3)))
    for i in range(DIM):
        complement = tuple(a for a in range(DIM) if a != i)
        sign = (-1) ** i
        table[i] = -0.5 * sign * five[:, :, :, top[complement]]
    table.flags.writeable = False
    return table
