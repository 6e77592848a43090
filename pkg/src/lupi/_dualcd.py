"""Dual coordinate descent kernel for the weighted soft-margin linear SVM.

Maximizes  sum_i a_i - 0.5 ||sum_i a_i y_i x_i||^2  over 0 <= a_i <= cost_i,
one coordinate at a time, visiting samples in a freshly shuffled order each
epoch. The shuffle uses an inline xorshift64* stream so identical inputs give
bit-identical results on every run and in every process.

JIT-compiled; keep this module free of anything numba cannot lower.
"""

import numpy as np
from numba import njit

# Fixed permutation stream seed: training is a deterministic function of
# its inputs alone.
PERMUTATION_SEED = np.uint64(0x9E3779B97F4A7C15)


@njit(cache=True)
def _next_u64(state):
    state ^= state >> np.uint64(12)
    state ^= state << np.uint64(25)
    state ^= state >> np.uint64(27)
    return state


@njit(cache=True)
def run_dual_cd(x, y, cost, tol, rel_tol, max_epochs, seed, dual_history):
    """Returns (w, alpha, epochs, gap, violation, converged).

    Stops when the duality gap certificate reaches tol (absolute) or
    rel_tol * max(1, |primal|) when rel_tol > 0, when an epoch produces
    no progress (max projected gradient ~ 0), or at max_epochs.
    dual_history[e] receives the dual objective after epoch e.
    """
    n, d = x.shape
    w = np.zeros(d)
    alpha = np.zeros(n)
    qdiag = np.empty(n)
    for i in range(n):
        acc = 0.0
        for j in range(d):
            acc += x[i, j] * x[i, j]
        qdiag[i] = acc

    order = np.arange(n)
    state = seed
    if state == np.uint64(0):
        state = np.uint64(1)

    gap = np.inf
    viol = np.inf
    epochs = 0
    converged = False

    for epoch in range(max_epochs):
        # Fisher-Yates shuffle from the xorshift stream.
        for k in range(n - 1, 0, -1):
            state = _next_u64(state)
            j = int(state % np.uint64(k + 1))
            tmp = order[k]
            order[k] = order[j]
            order[j] = tmp

        viol = 0.0
        for idx in range(n):
            i = order[idx]
            g = -1.0
            for j in range(d):
                g += y[i] * w[j] * x[i, j]
            pg = g
            if alpha[i] <= 0.0 and g > 0.0:
                pg = 0.0
            elif alpha[i] >= cost[i] and g < 0.0:
                pg = 0.0
            if abs(pg) > viol:
                viol = abs(pg)
            if pg != 0.0:
                old = alpha[i]
                if qdiag[i] > 0.0:
                    new = old - g / qdiag[i]
                else:
                    # Zero row: dual is linear in a_i, push to the bound.
                    new = cost[i] if g < 0.0 else 0.0
                if new < 0.0:
                    new = 0.0
                elif new > cost[i]:
                    new = cost[i]
                if new != old:
                    delta = (new - old) * y[i]
                    for j in range(d):
                        w[j] += delta * x[i, j]
                    alpha[i] = new

        epochs = epoch + 1
        wsq = 0.0
        for j in range(d):
            wsq += w[j] * w[j]
        dual = -0.5 * wsq
        for i in range(n):
            dual += alpha[i]
        dual_history[epoch] = dual

        primal = 0.5 * wsq
        for i in range(n):
            score = 0.0
            for j in range(d):
                score += w[j] * x[i, j]
            hinge = 1.0 - y[i] * score
            if hinge > 0.0:
                primal += cost[i] * hinge
        gap = primal - dual
        threshold = tol
        if rel_tol > 0.0:
            scale = abs(primal)
            if scale < 1.0:
                scale = 1.0
            if rel_tol * scale > threshold:
                threshold = rel_tol * scale
        if gap <= threshold:
            converged = True
            break
        if viol <= 1e-14:
            # No coordinate can move; flag if the certificate is still open.
            converged = gap <= threshold
            break

    return w, alpha, epochs, gap, viol, converged
