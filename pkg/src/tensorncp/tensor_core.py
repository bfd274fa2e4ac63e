"""Dense real tensors of order m and dimension n, and the multilinear products on them.

Entries are stored as a read-only ``numpy.ndarray`` of shape ``(n,) * m`` in
row-major order (first index slowest). Modes and indices are 0-based here;
only the text file formats in :mod:`tensorncp.formats` use 1-based indices.

Power contractions always consume the *trailing* modes, so ``A x^(m-1)`` is a
vector indexed by mode 0 and ``A x^(m-2)`` is a matrix indexed by modes (0, 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from math import factorial
from typing import Sequence

import numpy as np

SYMMETRY_TOL = 1e-12
SINGULAR_TOL = 1e-10


class Tensor:
    """Immutable dense order-``m`` dimension-``n`` real tensor.

    Examples
    --------
    >>> T = Tensor(2, 2, [1, 0, 0, 1])
    >>> T[1, 1]
    1.0
    """

    __slots__ = ("_data",)

    def __init__(self, order: int, dim: int, entries):
        if int(order) != order or int(dim) != dim or order < 1 or dim < 1:
            raise ValueError(f"order and dim must be positive integers, got {order}, {dim}")
        order, dim = int(order), int(dim)
        flat = np.array(entries, dtype=float).reshape(-1)
        if flat.size != dim**order:
            raise ValueError(
                f"expected {dim}^{order} = {dim**order} entries, got {flat.size}"
            )
        if not np.all(np.isfinite(flat)):
            raise ValueError("tensor entries must be finite")
        data = flat.reshape((dim,) * order)
        data.flags.writeable = False
        self._data = data

    @classmethod
    def from_array(cls, array) -> "Tensor":
        """Wrap an array whose shape is ``(n,) * m``."""
        array = np.asarray(array, dtype=float)
        if array.ndim < 1 or len(set(array.shape)) != 1:
            raise ValueError(f"array shape {array.shape} is not (n,)*m")
        return cls(array.ndim, array.shape[0], array)

    @property
    def order(self) -> int:
        return self._data.ndim

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    @property
    def data(self) -> np.ndarray:
        """Read-only view of the entries with shape ``(n,) * m``."""
        return self._data

    @property
    def entries(self) -> np.ndarray:
        """Flat entries in lexicographic index order."""
        return self._data.reshape(-1)

    def __getitem__(self, index: Sequence[int]) -> float:
        index = tuple(index) if not isinstance(index, tuple) else index
        if len(index) != self.order:
            raise IndexError(f"index tuple must have length {self.order}")
        for i in index:
            if not 0 <= i < self.dim:
                raise IndexError(f"index {i} out of range for dim {self.dim}")
        return float(self._data[index])

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._data, dtype=dtype)

    def __add__(self, other: "Tensor") -> "Tensor":
        _check_same_shape(self, other)
        return Tensor.from_array(self._data + other._data)

    def __sub__(self, other: "Tensor") -> "Tensor":
        _check_same_shape(self, other)
        return Tensor.from_array(self._data - other._data)

    def __mul__(self, scalar: float) -> "Tensor":
        return Tensor.from_array(float(scalar) * self._data)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return self._data.shape == other._data.shape and bool(
            np.array_equal(self._data, other._data)
        )

    def __hash__(self):
        return hash((self._data.shape, self._data.tobytes()))

    def __repr__(self) -> str:
        return f"Tensor(order={self.order}, dim={self.dim})"

    def contract(self, x, p: int | None = None):
        """Shorthand for :func:`contract_power`; ``p`` defaults to the order."""
        return contract_power(self, x, self.order if p is None else p)


def _check_same_shape(a: Tensor, b: Tensor) -> None:
    if a.data.shape != b.data.shape:
        raise ValueError(f"shape mismatch: {a.data.shape} vs {b.data.shape}")


def new_dense(order: int, dim: int, entries) -> Tensor:
    return Tensor(order, dim, entries)


def identity_tensor(order: int, dim: int) -> Tensor:
    """Diagonal tensor with ones on the superdiagonal ``(i, i, ..., i)``."""
    if order < 1 or dim < 1:
        raise ValueError("order and dim must be positive")
    data = np.zeros((dim,) * order)
    for i in range(dim):
        data[(i,) * order] = 1.0
    return Tensor.from_array(data)


def diagonal_tensor(diag, order: int) -> Tensor:
    diag = np.asarray(diag, dtype=float)
    data = np.zeros((diag.size,) * order)
    for i, d in enumerate(diag):
        data[(i,) * order] = d
    return Tensor.from_array(data)


def _check_mode(A: Tensor, k: int) -> None:
    if not 0 <= k < A.order:
        raise ValueError(f"mode {k} out of range for order {A.order}")


def mode_k_matrix_product(A: Tensor, B, k: int) -> Tensor:
    """Mode-``k`` product ``C[..., j, ...] = sum_i A[..., i, ...] * B[j, i]``."""
    _check_mode(A, k)
    B = np.asarray(B, dtype=float)
    if B.shape != (A.dim, A.dim):
        raise ValueError(f"matrix shape {B.shape} does not match dim {A.dim}")
    C = np.tensordot(B, A.data, axes=([1], [k]))
    return Tensor.from_array(np.moveaxis(C, 0, k))


def mode_k_vector_product(A: Tensor, x, k: int):
    """Contract mode ``k`` of ``A`` with ``x``; the result has order ``m - 1``.

    An order-1 input contracts to a plain float.
    """
    _check_mode(A, k)
    x = _as_vector(x, A.dim)
    C = np.tensordot(A.data, x, axes=([k], [0]))
    if C.ndim == 0:
        return float(C)
    return Tensor.from_array(C)


def _as_vector(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (dim,):
        raise ValueError(f"vector of shape {x.shape} does not match dim {dim}")
    return x


def contract_power(A: Tensor, x, p: int):
    """Contract the last ``p`` modes of ``A`` with the same vector ``x``.

    Returns a float when ``p == m``, otherwise an array of shape ``(n,) * (m - p)``.
    """
    if not 0 <= p <= A.order:
        raise ValueError(f"power {p} out of range for order {A.order}")
    x = _as_vector(x, A.dim)
    out = A.data
    for _ in range(p):
        out = out @ x
    if p == A.order:
        return float(out)
    return np.array(out)


def _canonical_index(shape, start: int = 0) -> tuple:
    """Index arrays mapping each entry to the one with modes ``start..`` sorted."""
    idx = np.indices(shape)
    idx[start:] = np.sort(idx[start:], axis=0)
    return tuple(idx)


def is_symmetric(A: Tensor, tol: float = SYMMETRY_TOL) -> bool:
    """Compare every entry against the entry at its sorted index tuple."""
    if A.order == 1:
        return True
    canonical = A.data[_canonical_index(A.data.shape)]
    return bool(np.all(np.abs(A.data - canonical) <= tol))


def _is_tail_symmetric(A: Tensor) -> bool:
    return bool(np.array_equal(A.data, A.data[_canonical_index(A.data.shape, 1)]))


def _average_over_axes(data: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    head = [a for a in range(data.ndim) if a not in axes]
    total = np.zeros_like(data)
    for perm in permutations(axes):
        total += np.transpose(data, head + list(perm))
    avg = total / factorial(len(axes))
    # summation order differs between permuted positions; copy one representative
    return avg[_canonical_index(data.shape, head[0] + 1 if head else 0)]


def symmetrize(A: Tensor) -> Tensor:
    """Average ``A`` over all ``m!`` index permutations."""
    if is_symmetric(A, 0.0):
        return A
    return Tensor.from_array(_average_over_axes(A.data, list(range(A.order))))


def partial_symmetrize_tail(A: Tensor) -> Tensor:
    """Average over permutations of modes ``1..m-1``, keeping mode 0 fixed.

    Leaves ``A x^(m-1)`` unchanged and makes ``(m-1) A x^(m-2)`` its exact Jacobian.
    """
    if A.order <= 2 or _is_tail_symmetric(A):
        return A
    return Tensor.from_array(_average_over_axes(A.data, list(range(1, A.order))))


def is_diagonal(A: Tensor, tol: float = 0.0) -> bool:
    if A.order == 1:
        return True
    idx = np.indices(A.data.shape)
    off = np.any(idx != idx[0], axis=0)
    return bool(np.all(np.abs(A.data[off]) <= tol))


@dataclass(frozen=True)
class DiagonalizableForm:
    """Diagonal entries ``diag`` and invertible ``basis`` defining
    ``D x_0 B x_1 B ... x_(m-1) B``."""

    diag: np.ndarray
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        diag = np.array(self.diag, dtype=float).reshape(-1)
        basis = np.array(self.basis, dtype=float)
        n = diag.size
        if basis.shape != (n, n):
            raise ValueError(f"basis shape {basis.shape} does not match {n} diagonal entries")
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(basis))):
            raise ValueError("diagonalizable form must be finite")
        if is_singular(basis):
            raise ValueError("basis matrix is singular")
        diag.flags.writeable = False
        basis.flags.writeable = False
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.diag.size

    def realize(self, order: int) -> Tensor:
        return from_diagonalizable(self, order)

    def evaluate(self, x, order: int) -> float:
        """``sum_i d_i (B^T x)_i^m`` without building the tensor."""
        y = self.basis.T @ np.asarray(x, dtype=float)
        return float(np.sum(self.diag * y**order))


def is_singular(B) -> bool:
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    scale = np.linalg.norm(B) ** n
    return bool(scale == 0.0 or abs(np.linalg.det(B)) < SINGULAR_TOL * scale)


def from_diagonalizable(form: DiagonalizableForm, order: int) -> Tensor:
    if order < 1:
        raise ValueError("order must be positive")
    if is_singular(form.basis):
        raise ValueError("basis matrix is singular")
    T = diagonal_tensor(form.diag, order)
    for k in range(order):
        T = mode_k_matrix_product(T, form.basis, k)
    # exact in exact arithmetic; averaging removes rounding asymmetry
    return symmetrize(T)
