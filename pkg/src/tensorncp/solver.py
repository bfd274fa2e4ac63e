"""Tensor complementarity problems and numerical solvers for them.

``NCP(q, A)``: find ``x >= 0`` with ``F(x) = A x^(m-1) + q >= 0`` and ``x^T F(x) = 0``.

``GNCP(q, {A_k})``: the same with ``F(x) = sum_k A_k x^(m-2k+1) + q`` where the
tensor orders run ``m, m-2, ..., 2``.
"""

from __future__ import annotations

import enum
import logging
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from .tensor_core import Tensor, contract_power, partial_symmetrize_tail, symmetrize
from .verify import complementarity_residual

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProblemInstance:
    """An NCP or GNCP instance.

    Tensors are stored tail-symmetrized (see
    :func:`~tensorncp.tensor_core.partial_symmetrize_tail`), which leaves ``F``
    unchanged and makes :meth:`jacobian` exact for arbitrary input tensors.
    Build instances with :meth:`ncp` or :meth:`gncp`.
    """

    kind: str
    tensors: tuple
    q: np.ndarray

    @classmethod
    def ncp(cls, A: Tensor, q) -> "ProblemInstance":
        return cls._build("NCP", [A], q)

    @classmethod
    def gncp(cls, tensors: Sequence[Tensor], q) -> "ProblemInstance":
        return cls._build("GNCP", list(tensors), q)

    @classmethod
    def _build(cls, kind, tensors, q):
        if not tensors:
            raise ValueError("at least one tensor is required")
        m, n = tensors[0].order, tensors[0].dim
        if m % 2 or m < 2:
            raise ValueError(f"order m must be even and >= 2, got {m}")
        if kind == "GNCP":
            want = list(range(m, 1, -2))
            got = [T.order for T in tensors]
            if got != want:
                raise ValueError(f"GNCP tensor orders must be {want}, got {got}")
        if any(T.dim != n for T in tensors):
            raise ValueError("all tensors must share the same dimension")
        q = np.array(q, dtype=float).reshape(-1)
        if q.shape != (n,):
            raise ValueError(f"q has length {q.size}, expected {n}")
        if not np.all(np.isfinite(q)):
            raise ValueError("q must be finite")
        if not np.any(q):
            warnings.warn("q = 0: the zero vector is a trivial solution", stacklevel=3)
        q.flags.writeable = False
        return cls(kind, tuple(partial_symmetrize_tail(T) for T in tensors), q)

    @property
    def m(self) -> int:
        return self.tensors[0].order

    @property
    def n(self) -> int:
        return self.tensors[0].dim

    def _x(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"vector of shape {x.shape} does not match n = {self.n}")
        return x

    def G(self, x) -> np.ndarray:
        x = self._x(x)
        return sum(contract_power(T, x, T.order - 1) for T in self.tensors)

    def F(self, x) -> np.ndarray:
        return self.G(x) + self.q

    def jacobian(self, x) -> np.ndarray:
        x = self._x(x)
        return sum((T.order - 1) * np.atleast_2d(contract_power(T, x, T.order - 2)) for T in self.tensors)

    def objective(self, x) -> float:
        """``x^T F(x)``, equal to ``A x^m + q^T x`` for NCP."""
        x = self._x(x)
        return float(x @ self.F(x))


def eval_F(P: ProblemInstance, x) -> np.ndarray:
    return P.F(x)


def eval_G(P: ProblemInstance, x) -> np.ndarray:
    return P.G(x)


def jacobian(P: ProblemInstance, x) -> np.ndarray:
    return P.jacobian(x)


class Status(enum.Enum):
    SOLVED = "Solved"
    NO_SOLUTION_FOUND = "NoSolutionFound"
    INFEASIBLE = "Infeasible"


METHODS = ("fb_newton", "proj_grad", "nlp")


@dataclass
class SolveOptions:
    method: str = "fb_newton"
    tol: float = 1e-10
    max_iter: int = 200
    starts: int = 32
    seed: int = 0
    cluster_radius: float = 1e-6

    def __post_init__(self):
        self.method = self.method.replace("-", "_")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.starts < 1:
            raise ValueError("starts must be >= 1")


@dataclass
class SolveReport:
    status: Status
    x: np.ndarray
    residual: float
    iterations: int
    starts_used: int
    method: str
    distinct_solutions: list = field(default_factory=list)
    stagnated_starts: list = field(default_factory=list)
    objective: float | None = None
    multipliers: np.ndarray | None = None

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED


# ---------------------------------------------------------------- merit function


def _fb(a, b):
    return np.hypot(a, b) - a - b


def _fb_system(P: ProblemInstance, x):
    """Fischer-Burmeister residual and one element of its generalized Jacobian."""
    Fx, J = P.F(x), P.jacobian(x)
    r = np.hypot(x, Fx)
    phi = r - x - Fx
    deg = r < 1e-14
    a = np.empty_like(x)
    b = np.empty_like(x)
    nd = ~deg
    a[nd] = x[nd] / r[nd] - 1.0
    b[nd] = Fx[nd] / r[nd] - 1.0
    if np.any(deg):
        z = deg.astype(float)
        Jz = J @ z
        s = np.hypot(z, Jz)[deg]
        a[deg] = z[deg] / s - 1.0
        b[deg] = Jz[deg] / s - 1.0
    H = np.diag(a) + b[:, None] * J
    return phi, H


def _merit(P, x) -> float:
    return 0.5 * float(np.sum(_fb(x, P.F(x)) ** 2))


def _newton_phase(P, x, opts, polish_tol):
    """Damped semismooth Newton on the FB residual. Returns (x, iterations, stagnated)."""
    sigma, rho, p = 1e-4, 1e-10, 2.1
    window = []
    for it in range(opts.max_iter):
        if complementarity_residual(P, x) <= polish_tol:
            return x, it, False
        phi, H = _fb_system(P, x)
        psi = 0.5 * float(phi @ phi)
        window.append(psi)
        if len(window) > 20 and window[-21] - psi <= 1e-6 * window[-21]:
            return x, it, True
        grad = H.T @ phi
        try:
            d = np.linalg.solve(H, -phi)
            if not np.all(np.isfinite(d)) or grad @ d > -rho * np.linalg.norm(d) ** p:
                d = -grad
        except np.linalg.LinAlgError:
            d = -grad
        slope = float(grad @ d)
        alpha = 1.0
        while alpha > 1e-14:
            x_new = x + alpha * d
            if _merit(P, x_new) <= psi + sigma * alpha * slope:
                break
            alpha *= 0.5
        else:
            return x, it, True
        if np.allclose(x_new, x, rtol=0, atol=1e-300):
            return x, it, True
        x = x_new
    return x, opts.max_iter, complementarity_residual(P, x) > opts.tol


def _projgrad_phase(P, x, opts, polish_tol):
    """Projected gradient on the FB merit over ``x >= 0``."""
    x = np.maximum(x, 0.0)
    step = 1.0
    window = []
    for it in range(opts.max_iter):
        if complementarity_residual(P, x) <= polish_tol:
            return x, it, False
        phi, H = _fb_system(P, x)
        psi = 0.5 * float(phi @ phi)
        window.append(psi)
        # stuck at a nonzero stationary point of the merit
        if len(window) > 20 and window[-21] - psi <= 1e-6 * window[-21]:
            return x, it, True
        grad = H.T @ phi
        step = min(step * 2.0, 1e6)
        while step > 1e-16:
            x_new = np.maximum(x - step * grad, 0.0)
            if _merit(P, x_new) <= psi - 1e-4 * float(grad @ (x - x_new)):
                break
            step *= 0.5
        else:
            return x, it, True
        x = x_new
    return x, opts.max_iter, complementarity_residual(P, x) > opts.tol


def _solve_from(P, x0, opts):
    polish_tol = opts.tol * 1e-3
    x, total = x0.copy(), 0
    if opts.method == "proj_grad":
        x, it, stag = _projgrad_phase(P, x, opts, polish_tol)
        return x, it, stag
    for _ in range(3):
        x, it, stag = _newton_phase(P, x, opts, polish_tol)
        total += it
        if not stag:
            break
        x, it, pg_stag = _projgrad_phase(P, x, opts, polish_tol)
        total += it
        if pg_stag:
            break
    return x, total, complementarity_residual(P, x) > opts.tol


def _scale(P: ProblemInstance) -> float:
    qn = float(np.max(np.abs(P.q)))
    lead = P.tensors[0]
    g = float(np.max(np.abs(contract_power(lead, np.ones(P.n), lead.order - 1))))
    if qn == 0 or g == 0:
        return 1.0
    return float(np.clip((qn / g) ** (1.0 / (P.m - 1)), 1e-3, 1e3))


def starting_points(P: ProblemInstance, count: int, seed: int) -> np.ndarray:
    """Origin, scaled unit vectors, the scaled all-ones vector, then seeded random
    nonnegative points; truncated to ``count`` rows."""
    n, s = P.n, _scale(P)
    fixed = [np.zeros(n), *(s * np.eye(n)), s * np.ones(n)]
    rng = np.random.default_rng(seed)
    extra = max(0, count - len(fixed))
    pts = np.vstack(fixed + [2.0 * s * rng.random((extra, n))]) if extra else np.vstack(fixed)
    return pts[:count]


def cluster(points, radius: float) -> list:
    """Greedy clustering by distance ``radius * (1 + ||c||)``; sorted lexicographically."""
    centers: list[np.ndarray] = []
    for x in points:
        if not any(np.linalg.norm(x - c) <= radius * (1 + np.linalg.norm(c)) for c in centers):
            centers.append(np.asarray(x))
    return sorted(centers, key=lambda c: tuple(c))


def solve(P: ProblemInstance, opts: SolveOptions | None = None) -> SolveReport:
    """Multi-start search for a solution of ``P``.

    Each start runs damped semismooth Newton on the Fischer-Burmeister
    residual, switching to projected gradient whenever the line search
    stalls. ``NoSolutionFound`` lists the stagnated starts; it does not
    prove that no solution exists.
    """
    opts = opts or SolveOptions()
    if opts.method == "nlp":
        return solve_nlp(P, opts)
    best_x, best_r, iters = None, np.inf, 0
    solutions, stagnated = [], []
    for k, x0 in enumerate(starting_points(P, opts.starts, opts.seed)):
        x, it, stag = _solve_from(P, x0, opts)
        iters += it
        r = complementarity_residual(P, x)
        if r <= opts.tol:
            solutions.append(x)
        elif stag:
            stagnated.append(k)
        if r < best_r:
            best_x, best_r = x, r
    status = Status.SOLVED if best_r <= opts.tol else Status.NO_SOLUTION_FOUND
    if status is not Status.SOLVED:
        logger.info("no start reached tol %.3g (best %.3g)", opts.tol, best_r)
    return SolveReport(
        status=status, x=best_x, residual=best_r, iterations=iters,
        starts_used=opts.starts, method=opts.method,
        distinct_solutions=cluster(solutions, opts.cluster_radius),
        stagnated_starts=stagnated, objective=P.objective(best_x),
    )


def uniqueness_probe(P: ProblemInstance, opts: SolveOptions | None = None) -> list:
    """Clustered solutions over many starts. One cluster is evidence, not proof, of uniqueness."""
    opts = opts or SolveOptions(starts=64)
    return solve(P, opts).distinct_solutions


def solve_nlp(P: ProblemInstance, opts: SolveOptions | None = None) -> SolveReport:
    """Minimize ``A x^m + q^T x`` over ``{x >= 0, A x^(m-1) + q >= 0}``.

    Uses an augmented Lagrangian on the ``F(x) >= 0`` constraints with
    bound-constrained L-BFGS-B inner solves; the final multipliers are
    reported. A point counts as solved only if its objective vanishes.
    """
    opts = opts or SolveOptions(method="nlp")
    if P.kind != "NCP":
        raise ValueError("the NLP formulation is defined for single-tensor NCP instances")
    A = P.tensors[0]
    full = symmetrize(A).data
    m, q = P.m, P.q

    def f_and_grad(x):
        v = full
        for _ in range(m - 1):
            v = v @ x
        return float(v @ x + q @ x), m * v + q

    best = None
    iters = 0
    for x0 in starting_points(P, min(opts.starts, 8), opts.seed):
        x, lam, mu = x0.copy(), np.zeros(P.n), 10.0
        viol_prev = np.inf
        for outer in range(50):
            def aug(z, lam=lam, mu=mu):
                f, g = f_and_grad(z)
                c, J = P.F(z), P.jacobian(z)
                s = np.maximum(0.0, lam - mu * c)
                val = f + (float(s @ s) - float(lam @ lam)) / (2 * mu)
                return val, g - J.T @ s

            res = optimize.minimize(
                aug, x, jac=True, method="L-BFGS-B", bounds=[(0.0, None)] * P.n,
                options={"maxiter": opts.max_iter * 5, "ftol": 1e-16, "gtol": 1e-14},
            )
            iters += int(res.nit)
            x = res.x
            c = P.F(x)
            lam = np.maximum(0.0, lam - mu * c)
            viol = float(np.max(np.maximum(-c, 0.0)))
            if viol <= opts.tol * 1e-2 and abs(P.objective(x)) <= opts.tol * 1e-2:
                break
            if viol > 0.25 * viol_prev:
                mu = min(mu * 10.0, 1e12)
            viol_prev = viol
        cand = (complementarity_residual(P, x), abs(P.objective(x)), x, lam)
        if best is None or cand[:2] < best[:2]:
            best = cand
    r, obj, x, lam = best
    solved = r <= opts.tol and obj <= opts.tol
    return SolveReport(
        status=Status.SOLVED if solved else Status.NO_SOLUTION_FOUND,
        x=x, residual=r, iterations=iters, starts_used=min(opts.starts, 8),
        method="nlp", distinct_solutions=[x] if solved else [],
        objective=P.objective(x), multipliers=lam,
    )
