"""Seeded generators for the structured tensor families used in experiments."""

from __future__ import annotations

import numpy as np

from .tensor_core import DiagonalizableForm, Tensor, identity_tensor, symmetrize

KINDS = ("identity", "diagpd", "allpos", "random-symmetric")


def well_conditioned_matrix(n: int, rng: np.random.Generator, max_cond: float = 10.0) -> np.ndarray:
    """Gaussian matrix with singular values rescaled into ``[1, max_cond]``."""
    U, _, Vt = np.linalg.svd(rng.standard_normal((n, n)))
    s = np.sort(rng.uniform(1.0, max_cond, n))[::-1]
    s[0], s[-1] = max_cond, 1.0
    if n == 1:
        s[0] = 1.0
    return (U * s) @ Vt


def diagonalizable_pd_form(n: int, rng: np.random.Generator, low: float = 0.5, high: float = 2.0,
                           max_cond: float = 10.0) -> DiagonalizableForm:
    return DiagonalizableForm(rng.uniform(low, high, n), well_conditioned_matrix(n, rng, max_cond))


def random_symmetric(order: int, dim: int, rng: np.random.Generator, low: float = -1.0, high: float = 1.0) -> Tensor:
    return symmetrize(Tensor.from_array(rng.uniform(low, high, (dim,) * order)))


def symmetric_pd_matrix(n: int, rng: np.random.Generator, shift: float = 0.5) -> np.ndarray:
    M = rng.standard_normal((n, n))
    return M @ M.T + shift * np.eye(n)


def mixed_sign_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform ``[-1, 1]`` entries with at least one negative and, for ``n > 1``, one positive."""
    q = rng.uniform(-1.0, 1.0, n)
    q[0] = -abs(q[0]) - 0.05
    if n > 1:
        q[-1] = abs(q[-1]) + 0.05
    return q


def generate(kind: str, order: int, dim: int, seed: int) -> Tensor:
    rng = np.random.default_rng(seed)
    if kind == "identity":
        return identity_tensor(order, dim)
    if kind == "diagpd":
        return diagonalizable_pd_form(dim, rng).realize(order)
    if kind == "allpos":
        return random_symmetric(order, dim, rng, 0.1, 1.0)
    if kind == "random-symmetric":
        return random_symmetric(order, dim, rng)
    raise ValueError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
