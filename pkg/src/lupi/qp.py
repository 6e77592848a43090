"""Dense convex quadratic programming.

Solves   minimize    0.5 x'Px + q'x
         subject to  Gx <= h,  Ax = b

with a primal-dual interior-point method (Mehrotra predictor-corrector),
dense linear algebra throughout. Problem sizes here are at most a few
hundred variables, so each Newton step is a direct solve of the reduced
KKT system.

Every solution carries a KKT residual so callers can treat this solver
as a certificate-producing oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

OPTIMAL = "optimal"
MAX_ITERATIONS = "max_iterations"
INFEASIBLE = "infeasible"

# Absorbs positive-semidefinite-but-singular Hessians (bias variables
# carry zero curvature in the SVM+ primal).
_P_REGULARIZATION = 1e-10

_SYMMETRY_TOL = 1e-10
_EIG_TOL = -1e-8
# Eigenvalue check is O(n^3); trusted above this size.
_EIG_CHECK_MAX_N = 400


@dataclass(frozen=True)
class QpProblem:
    """A dense convex QP: 0.5 x'Px + q'x, Gx <= h, Ax = b."""

    p_matrix: np.ndarray
    q: np.ndarray
    g_ineq: Optional[np.ndarray] = None
    h_ineq: Optional[np.ndarray] = None
    a_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None

    def __post_init__(self):
        p = np.asarray(self.p_matrix, dtype=float)
        q = np.asarray(self.q, dtype=float).ravel()
        object.__setattr__(self, "p_matrix", p)
        object.__setattr__(self, "q", q)
        n = q.shape[0]
        if p.shape != (n, n):
            raise ValueError(f"P must be {n}x{n}, got {p.shape}")
        if np.max(np.abs(p - p.T), initial=0.0) > _SYMMETRY_TOL:
            raise ValueError("P is not symmetric within 1e-10")
        if n <= _EIG_CHECK_MAX_N:
            if np.linalg.eigvalsh(p).min() < _EIG_TOL:
                raise ValueError("P has an eigenvalue below -1e-8")
        if (self.g_ineq is None) != (self.h_ineq is None):
            raise ValueError("g_ineq and h_ineq must be given together")
        if self.g_ineq is not None:
            g = np.asarray(self.g_ineq, dtype=float)
            h = np.asarray(self.h_ineq, dtype=float).ravel()
            if g.ndim != 2 or g.shape != (h.shape[0], n):
                raise ValueError(f"G must be {h.shape[0]}x{n}, got {g.shape}")
            object.__setattr__(self, "g_ineq", g)
            object.__setattr__(self, "h_ineq", h)
        if (self.a_eq is None) != (self.b_eq is None):
            raise ValueError("a_eq and b_eq must be given together")
        if self.a_eq is not None:
            a = np.asarray(self.a_eq, dtype=float)
            b = np.asarray(self.b_eq, dtype=float).ravel()
            if a.ndim != 2 or a.shape != (b.shape[0], n):
                raise ValueError(f"A must be {b.shape[0]}x{n}, got {a.shape}")
            object.__setattr__(self, "a_eq", a)
            object.__setattr__(self, "b_eq", b)
        for name in ("p_matrix", "q", "g_ineq", "h_ineq", "a_eq", "b_eq"):
            arr = getattr(self, name)
            if arr is not None and not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @property
    def n_ineq(self) -> int:
        return 0 if self.g_ineq is None else self.g_ineq.shape[0]

    @property
    def n_eq(self) -> int:
        return 0 if self.a_eq is None else self.a_eq.shape[0]

    def objective(self, x: np.ndarray) -> float:
        return float(0.5 * x @ self.p_matrix @ x + self.q @ x)


@dataclass(frozen=True)
class QpSolution:
    x: np.ndarray
    lambda_ineq: np.ndarray
    nu_eq: np.ndarray
    objective: float
    kkt_residual: float
    status: str
    iterations: int = 0


def kkt_residual(problem: QpProblem, x: np.ndarray,
                 lambda_ineq: np.ndarray, nu_eq: np.ndarray) -> float:
    """Max violation over stationarity, feasibility, dual feasibility and
    complementary slackness at (x, lambda, nu)."""
    stat = problem.p_matrix @ x + problem.q
    worst = 0.0
    if problem.n_ineq:
        gap = problem.g_ineq @ x - problem.h_ineq
        stat = stat + problem.g_ineq.T @ lambda_ineq
        worst = max(worst, float(np.max(gap, initial=0.0)))          # primal
        worst = max(worst, float(np.max(-lambda_ineq, initial=0.0)))  # dual
        worst = max(worst, float(np.max(np.abs(lambda_ineq * gap))))  # compl.
    if problem.n_eq:
        stat = stat + problem.a_eq.T @ nu_eq
        worst = max(worst, float(np.max(np.abs(problem.a_eq @ x - problem.b_eq))))
    worst = max(worst, float(np.max(np.abs(stat))))
    return worst


def _primal_infeasibility(problem: QpProblem, x: np.ndarray) -> float:
    worst = 0.0
    if problem.n_ineq:
        worst = max(worst, float(np.max(problem.g_ineq @ x - problem.h_ineq,
                                        initial=0.0)))
    if problem.n_eq:
        worst = max(worst, float(np.max(np.abs(problem.a_eq @ x - problem.b_eq))))
    return worst


def _solve_equality_only(problem: QpProblem, p_reg: np.ndarray,
                         tol: float) -> QpSolution:
    n, p = problem.n, problem.n_eq
    if p == 0:
        x = np.linalg.solve(p_reg, -problem.q)
        lam = np.zeros(0)
        nu = np.zeros(0)
    else:
        kkt = np.zeros((n + p, n + p))
        kkt[:n, :n] = p_reg
        kkt[:n, n:] = problem.a_eq.T
        kkt[n:, :n] = problem.a_eq
        rhs = np.concatenate([-problem.q, problem.b_eq])
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError:
            sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
        x, nu = sol[:n], sol[n:]
        lam = np.zeros(0)
    res = kkt_residual(problem, x, lam, nu)
    if res <= tol:
        status = OPTIMAL
    elif _primal_infeasibility(problem, x) > np.sqrt(tol):
        status = INFEASIBLE
    else:
        status = MAX_ITERATIONS
    return QpSolution(x=x, lambda_ineq=lam, nu_eq=nu,
                      objective=problem.objective(x),
                      kkt_residual=res, status=status, iterations=1)


def solve_qp(problem: QpProblem, tol: float = 1e-8,
             max_iter: int = 100) -> QpSolution:
    """Solve a dense convex QP to the requested KKT residual.

    Returns status "optimal" with kkt_residual <= tol on success,
    "infeasible" when primal infeasibility stalls above sqrt(tol), and
    "max_iterations" (best iterate, with its residual) otherwise.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n, m, p = problem.n, problem.n_ineq, problem.n_eq
    p_reg = problem.p_matrix + _P_REGULARIZATION * np.eye(n)

    if m == 0:
        return _solve_equality_only(problem, p_reg, tol)

    g, h = problem.g_ineq, problem.h_ineq
    a = problem.a_eq if p else np.zeros((0, n))
    b = problem.b_eq if p else np.zeros(0)

    # Infeasible start: x from the equality least-squares fit, slacks and
    # multipliers pushed safely into the positive orthant.
    x = np.linalg.lstsq(a, b, rcond=None)[0] if p else np.zeros(n)
    s = np.maximum(h - g @ x, 1.0)
    lam = np.ones(m)
    nu = np.zeros(p)

    best: Optional[QpSolution] = None
    infeas_history: list[float] = []
    status = MAX_ITERATIONS
    iterations = 0

    for it in range(1, max_iter + 1):
        iterations = it
        res = kkt_residual(problem, x, lam, nu)
        if best is None or res < best.kkt_residual:
            best = QpSolution(x=x.copy(), lambda_ineq=lam.copy(),
                              nu_eq=nu.copy(), objective=problem.objective(x),
                              kkt_residual=res, status=status, iterations=it)
        if res <= tol:
            status = OPTIMAL
            break

        prim_inf = _primal_infeasibility(problem, x)
        infeas_history.append(prim_inf)
        if (len(infeas_history) > 10
                and prim_inf > np.sqrt(tol)
                and prim_inf > 0.5 * infeas_history[-11]):
            status = INFEASIBLE
            break

        # Residuals track the original problem; the 1e-10 regularization
        # enters only the factorized Newton matrix below.
        r_d = problem.p_matrix @ x + problem.q + g.T @ lam + (a.T @ nu if p else 0.0)
        r_p = g @ x + s - h
        r_e = a @ x - b
        mu = float(s @ lam) / m

        w = lam / s
        reduced = p_reg + (g * w[:, None]).T @ g
        if p:
            kkt = np.zeros((n + p, n + p))
            kkt[:n, :n] = reduced
            kkt[:n, n:] = a.T
            kkt[n:, :n] = a
        else:
            kkt = reduced

        def newton_step(r_c):
            rhs_x = -r_d + g.T @ ((r_c - lam * r_p) / s)
            rhs = np.concatenate([rhs_x, -r_e]) if p else rhs_x
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
            dx = sol[:n]
            dnu = sol[n:] if p else np.zeros(0)
            ds = -r_p - g @ dx
            dlam = (-r_c - lam * ds) / s
            return dx, ds, dlam, dnu

        def max_step(v, dv):
            neg = dv < 0
            if not np.any(neg):
                return 1.0
            return min(1.0, float(np.min(-v[neg] / dv[neg])))

        # Predictor (affine scaling) then Mehrotra corrector.
        dx_a, ds_a, dlam_a, dnu_a = newton_step(lam * s)
        alpha_p = max_step(s, ds_a)
        alpha_d = max_step(lam, dlam_a)
        mu_aff = float((s + alpha_p * ds_a) @ (lam + alpha_d * dlam_a)) / m
        sigma = (mu_aff / mu) ** 3 if mu > 0 else 0.0

        r_c = lam * s - sigma * mu + ds_a * dlam_a
        dx, ds, dlam, dnu = newton_step(r_c)

        eta = 0.99 if mu > 1e-6 else 0.999
        alpha_p = min(1.0, eta * max_step(s, ds))
        alpha_d = min(1.0, eta * max_step(lam, dlam))
        x = x + alpha_p * dx
        s = s + alpha_p * ds
        lam = lam + alpha_d * dlam
        nu = nu + alpha_d * dnu

    if status == OPTIMAL:
        return QpSolution(x=x, lambda_ineq=lam, nu_eq=nu,
                          objective=problem.objective(x),
                          kkt_residual=kkt_residual(problem, x, lam, nu),
                          status=OPTIMAL, iterations=iterations)
    assert best is not None
    return QpSolution(x=best.x, lambda_ineq=best.lambda_ineq,
                      nu_eq=best.nu_eq, objective=best.objective,
                      kkt_residual=best.kkt_residual, status=status,
                      iterations=iterations)
