"""Shared random-instance builders for the test suite.

Everything here is oracle-side machinery: QP assemblies of the SVM
training problems, feasible-point samplers, random problem generators.
Kept independent of the solver internals on purpose.
"""

import numpy as np

from lupi.qp import QpProblem


def random_qp(rng, n_max=8, m_max=10, allow_eq=True, strictly_convex=False):
    """Random dense convex QP with a known strictly feasible point.

    P is PSD (sometimes rank-deficient unless strictly_convex),
    inequalities are anchored at a random x0 with strictly positive
    slack, equalities (when present) pass through x0, so Slater's
    condition holds by construction.
    """
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(0, m_max + 1))
    rank = n if strictly_convex else int(rng.integers(1, n + 1))
    factor = rng.normal(size=(rank, n))
    p_matrix = factor.T @ factor
    if strictly_convex:
        p_matrix += 0.1 * np.eye(n)
    # q in range(P) keeps the objective bounded below even when P is
    # rank-deficient and the constraints leave flat directions open.
    q = p_matrix @ rng.normal(size=n)
    x0 = rng.normal(size=n)
    g = h = None
    if m:
        g = rng.normal(size=(m, n))
        h = g @ x0 + rng.uniform(0.1, 1.0, size=m)
    a = b = None
    if allow_eq and n >= 2 and rng.random() < 0.3:
        p_eq = int(rng.integers(1, min(n - 1, 2) + 1))
        a = rng.normal(size=(p_eq, n))
        b = a @ x0
    problem = QpProblem(p_matrix=p_matrix, q=q, g_ineq=g, h_ineq=h,
                        a_eq=a, b_eq=b)
    return problem, x0


def sample_feasible_points(problem, x0, rng, count=10, radius=0.5):
    """Rejection-sample feasible points from a box around x0.

    With equality constraints the box lives in their null space so the
    equalities stay satisfied exactly (up to lstsq accuracy).
    """
    n = problem.n
    points = []
    if problem.n_eq:
        _, sing, vt = np.linalg.svd(problem.a_eq)
        null_dim = n - int(np.sum(sing > 1e-10))
        if null_dim == 0:
            return [x0]
        basis = vt[n - null_dim:].T
    else:
        basis = np.eye(n)
    attempts = 0
    while len(points) < count and attempts < 60 * count:
        attempts += 1
        z = x0 + basis @ rng.uniform(-radius, radius, size=basis.shape[1])
        if problem.n_ineq and np.any(problem.g_ineq @ z > problem.h_ineq):
            continue
        points.append(z)
    points.append(x0)
    return points


def check_kkt(problem, solution, tol):
    """Recompute every KKT condition from scratch; assert all within tol."""
    x, lam, nu = solution.x, solution.lambda_ineq, solution.nu_eq
    stationarity = problem.p_matrix @ x + problem.q
    if problem.n_ineq:
        gap = problem.g_ineq @ x - problem.h_ineq
        assert np.max(gap, initial=0.0) <= tol, "primal inequality violated"
        assert np.min(lam, initial=0.0) >= -tol, "negative multiplier"
        assert np.max(np.abs(lam * gap)) <= tol, "complementary slackness"
        stationarity = stationarity + problem.g_ineq.T @ lam
    if problem.n_eq:
        assert np.max(np.abs(problem.a_eq @ x - problem.b_eq)) <= tol
        stationarity = stationarity + problem.a_eq.T @ nu
    assert np.max(np.abs(stationarity)) <= tol, "stationarity violated"


def svm_primal_qp(x, y, cost):
    """Primal QP of the weighted soft-margin SVM in variables (w, xi).

    minimize 0.5||w||^2 + sum_i cost_i xi_i
    s.t.     y_i <w, x_i> >= 1 - xi_i  and  xi_i >= 0.
    """
    return margin_primal_qp(x, y, cost, np.ones(x.shape[0]))


def margin_primal_qp(x, y, cost, rho):
    """Primal QP of the data-dependent-margin SVM (no bias) in (w, xi).

    minimize 0.5||w||^2 + sum_i cost_i xi_i
    s.t.     y_i <w, x_i> >= rho_i - xi_i  and  xi_i >= 0.
    """
    n_samples, d = x.shape
    n = d + n_samples
    p_matrix = np.zeros((n, n))
    p_matrix[:d, :d] = np.eye(d)
    q = np.concatenate([np.zeros(d), np.asarray(cost, dtype=float)])
    g = np.zeros((2 * n_samples, n))
    g[:n_samples, :d] = -(y[:, None] * x)
    g[:n_samples, d:] = -np.eye(n_samples)
    g[n_samples:, d:] = -np.eye(n_samples)
    h = np.concatenate([-np.asarray(rho, dtype=float), np.zeros(n_samples)])
    return QpProblem(p_matrix=p_matrix, q=q, g_ineq=g, h_ineq=h)


def pair_count_tau(u, v):
    """O(n^2) pair-counting Kendall tau-b oracle (tie-corrected)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    n = len(u)
    concordant = discordant = ties_u = ties_v = 0
    for i in range(n):
        for j in range(i + 1, n):
            du = u[i] - u[j]
            dv = v[i] - v[j]
            if du == 0 and dv == 0:
                ties_u += 1
                ties_v += 1
            elif du == 0:
                ties_u += 1
            elif dv == 0:
                ties_v += 1
            elif (du > 0) == (dv > 0):
                concordant += 1
            else:
                discordant += 1
    n0 = n * (n - 1) // 2
    denom = np.sqrt(float(n0 - ties_u) * float(n0 - ties_v))
    if denom == 0:
        return None
    return (concordant - discordant) / denom


def random_svm_instance(rng, n_max=40, d_max=6, separable=False):
    n = int(rng.integers(4, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    # Ensure both classes appear.
    y[0], y[1] = 1.0, -1.0
    if separable:
        direction = rng.normal(size=d)
        direction /= np.linalg.norm(direction)
        x = y[:, None] * (rng.uniform(1.0, 2.0, size=(n, 1)) * direction)
        x += 0.05 * rng.normal(size=(n, d))
    else:
        x = rng.normal(size=(n, d)) + 0.5 * y[:, None]
    cost = rng.uniform(0.1, 10.0, size=n)
    return x, y, cost
