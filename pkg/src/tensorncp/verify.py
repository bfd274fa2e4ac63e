"""Checks on candidate solutions that do not depend on how they were found."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .tensor_core import contract_power

if TYPE_CHECKING:
    from .solver import ProblemInstance


def _vec(P: "ProblemInstance", x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (P.n,):
        raise ValueError(f"vector of shape {x.shape} does not match n = {P.n}")
    return x


def feasibility(P: "ProblemInstance", x, tol: float = 0.0) -> bool:
    """Membership of ``x`` in ``{x >= 0 : F(x) >= 0}`` up to ``tol``."""
    x = _vec(P, x)
    return bool(np.all(x >= -tol) and np.all(P.F(x) >= -tol))


def complementarity_residual(P: "ProblemInstance", x) -> float:
    """``max(||min(x, F(x))||_inf, |x^T F(x)| / (1 + ||q||))``; zero exactly at solutions."""
    x = _vec(P, x)
    Fx = P.F(x)
    nat = float(np.max(np.abs(np.minimum(x, Fx))))
    gap = abs(float(x @ Fx)) / (1.0 + float(np.linalg.norm(P.q)))
    return max(nat, gap)


@dataclass
class KktCertificate:
    """First-order multiplier conditions for the NLP ``min A x^m + q^T x``
    over ``{x >= 0, A x^(m-1) + q >= 0}`` at a given pair ``(x, u)``.

    ``ineq7`` is the per-index product that must be nonpositive at a KKT
    pair; ``ineq8`` and ``ineq9`` are its two summands.
    """

    x: np.ndarray
    u: np.ndarray
    stationarity: np.ndarray
    stationarity_min: float
    stationarity_comp: float
    u_min: float
    u_comp: float
    ineq7: np.ndarray
    ineq8: np.ndarray
    ineq9: np.ndarray
    passed: bool
    tol: float

    @property
    def ineq7_holds(self) -> bool:
        return bool(np.all(self.ineq7 <= self.tol))


def kkt_check(P: "ProblemInstance", x, u, tol: float = 1e-8) -> KktCertificate:
    if P.kind != "NCP":
        raise ValueError("KKT certificate is only available for single-tensor NCP instances")
    x, u = _vec(P, x), _vec(P, u)
    A, m = P.tensors[0], P.m
    Ax_m1 = contract_power(A, x, m - 1)
    Ax_m2 = contract_power(A, x, m - 2)
    stat = P.q + m * Ax_m1 - (m - 1) * (Ax_m2 @ u)
    w = Ax_m2 @ (x - u)
    ineq8 = (m - 1) * x * w
    ineq9 = -(m - 1) * u * w
    ineq7 = (m - 1) * (x - u) * w
    cert = KktCertificate(
        x=x, u=u, stationarity=stat,
        stationarity_min=float(np.min(stat)),
        stationarity_comp=float(x @ stat),
        u_min=float(np.min(u)),
        u_comp=float(u @ (P.q + Ax_m1)),
        ineq7=ineq7, ineq8=ineq8, ineq9=ineq9,
        passed=False, tol=tol,
    )
    cert.passed = (
        cert.stationarity_min >= -tol
        and abs(cert.stationarity_comp) <= tol
        and cert.u_min >= -tol
        and abs(cert.u_comp) <= tol
    )
    return cert


def theorem2_condition(P: "ProblemInstance", x, tol: float = 1e-12) -> bool:
    """Whether the symmetric part of ``A x^(m-2)`` is positive definite at ``x``."""
    if P.kind != "NCP":
        raise ValueError("condition is stated for single-tensor NCP instances")
    x = _vec(P, x)
    if not np.any(x):
        raise ValueError("x must be nonzero")
    M = np.atleast_2d(contract_power(P.tensors[0], x, P.m - 2))
    return bool(np.linalg.eigvalsh(0.5 * (M + M.T))[0] > tol)


def feasibility_probe(P: "ProblemInstance", budget: int = 1000, seed: int = 0) -> np.ndarray | None:
    """Look for a point of the feasible set along ``lam * 1`` and at random
    nonnegative points. ``None`` does not prove the set is empty."""
    ones = np.ones(P.n)
    lams = [0.0] + [2.0**k for k in range(min(budget, 60))]
    for lam in lams:
        if feasibility(P, lam * ones):
            return lam * ones
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        x = 10.0 ** rng.uniform(-2, 2) * rng.random(P.n)
        if feasibility(P, x):
            return x
    return None
