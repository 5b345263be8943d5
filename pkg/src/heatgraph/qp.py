"""Proximal Laplacian sub-problem solved in edge-weight space.

The feasible set {tr(L) = n, L = L^T, L_ij <= 0 (i != j), L 1 = 0} is the
image of the scaled simplex {w >= 0, sum w = n/2} under the linear map that
puts -w on the off-diagonals and row sums on the diagonal. In weight space
the sub-problem objective

    <L - L_prev, G> + (d_t / 2) ||L - L_prev||_F^2 + beta ||L||_F^2

is a strongly convex quadratic, minimized by accelerated projected gradient
with Euclidean projection onto the scaled simplex. The returned matrix
satisfies every Laplacian invariant exactly by construction.
"""

from functools import lru_cache

import numpy as np

from .errors import ConfigError, ConvergenceError

QP_TOL = 1e-8
QP_MAX_ITER = 5000
_RESIDUAL_CHECK_EVERY = 4


def laplacian_to_weights(l):
    """Upper-triangular off-diagonal weights w_ij = -L_ij, row-major order."""
    l = np.asarray(l, dtype=float)
    iu, ju = np.triu_indices(l.shape[0], k=1)
    return -l[iu, ju]


def weights_to_laplacian(w, n=None):
    """Inverse of laplacian_to_weights; the diagonal carries the row sums."""
    w = np.asarray(w, dtype=float)
    if n is None:
        n = int(round((1 + np.sqrt(1 + 8 * w.size)) / 2))
    if w.size != n * (n - 1) // 2:
        raise ConfigError(f"weight vector of size {w.size} does not match n={n}")
    l = np.zeros((n, n))
    iu, ju = np.triu_indices(n, k=1)
    l[iu, ju] = -w
    l += l.T
    np.fill_diagonal(l, -l.sum(axis=1))
    return l


def project_scaled_simplex(v, total):
    """Euclidean projection onto {x >= 0, sum x = total} by sort-and-threshold."""
    if total <= 0:
        raise ConfigError("simplex total must be positive")
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - total
    idx = np.arange(1, v.size + 1)
    # The active prefix {j: u_j > (cumsum_j - total)/j} always ends at rho.
    rho = int(np.count_nonzero(u * idx > css))
    theta = css[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


@lru_cache(maxsize=32)
def _pair_indices(n):
    iu, ju = np.triu_indices(n, k=1)
    iu.setflags(write=False)
    ju.setflags(write=False)
    return iu, ju


def _adjoint(g, iu, ju):
    """Map a symmetric matrix to weight space: (G_ii + G_jj - 2 G_ij)."""
    d = np.diag(g)
    return d[iu] + d[ju] - 2.0 * g[iu, ju]


def _gram_apply(u, n, iu, ju):
    """Apply P = A^T A where A is the weight->Laplacian map.

    (P u)_ij = deg_i(u) + deg_j(u) + 2 u_ij with deg the weighted degrees.
    """
    deg = (np.bincount(iu, weights=u, minlength=n)
           + np.bincount(ju, weights=u, minlength=n))
    return deg[iu] + deg[ju] + 2.0 * u


def _gram_top_eigenvalue(n, iu, ju, iters=30):
    """Largest eigenvalue of P by power iteration.

    The all-ones vector is itself the top eigenvector (P 1 = 2n 1), so the
    iteration settles immediately; the loop guards the general case.
    """
    v = np.ones(n * (n - 1) // 2)
    lam = 2.0 * n
    for _ in range(iters):
        pv = _gram_apply(v, n, iu, ju)
        lam_new = float(v @ pv / (v @ v))
        nv = float(np.sqrt(pv @ pv))
        if nv == 0.0:
            return lam_new
        v = pv / nv
        if abs(lam_new - lam) <= 1e-13 * max(1.0, abs(lam_new)):
            return lam_new
        lam = lam_new
    return lam


def solve_laplacian_qp(grad_l, l_prev, d_t, beta, tol=QP_TOL,
                       max_iter=QP_MAX_ITER, w_start=None):
    """Minimize the proximal sub-problem objective over valid Laplacians.

    Accelerated projected gradient in weight space with momentum restarts on
    objective increase; stops when the projected-gradient fixed-point
    residual drops below tol * max(1, ||w||). Raises ConvergenceError (with
    the residual attached) after max_iter iterations.
    """
    if d_t <= 0:
        raise ConfigError("proximal weight d_t must be positive")
    if beta < 0:
        raise ConfigError("beta must be non-negative")
    l_prev = np.asarray(l_prev, dtype=float)
    n = l_prev.shape[0]
    iu, ju = _pair_indices(n)
    total = n / 2.0

    b = _adjoint(np.asarray(grad_l, dtype=float), iu, ju)
    w_prev = -l_prev[iu, ju]

    def grad(w):
        return b + _gram_apply(d_t * (w - w_prev) + 2.0 * beta * w, n, iu, ju)

    def objective(w):
        dw = w - w_prev
        pdw = _gram_apply(dw, n, iu, ju)
        pw = _gram_apply(w, n, iu, ju)
        return float(b @ dw + 0.5 * d_t * (dw @ pdw) + beta * (w @ pw))

    lip = (d_t + 2.0 * beta) * _gram_top_eigenvalue(n, iu, ju) * (1.0 + 1e-9)
    step = 1.0 / lip

    w = project_scaled_simplex(w_prev if w_start is None else w_start, total)
    y = w.copy()
    t = 1.0
    f_w = objective(w)
    residual = np.inf
    for it in range(max_iter):
        w_next = project_scaled_simplex(y - step * grad(y), total)
        f_next = objective(w_next)
        if f_next > f_w:
            # Momentum overshoot: restart from the last accepted point.
            y = w.copy()
            t = 1.0
            w_next = project_scaled_simplex(y - step * grad(y), total)
            f_next = objective(w_next)
        t_next = (1.0 + np.sqrt(1.0 + 4.0 * t * t)) / 2.0
        y = w_next + ((t - 1.0) / t_next) * (w_next - w)
        step_norm = float(np.sqrt((w_next - w) @ (w_next - w)))
        w, f_w, t = w_next, f_next, t_next

        # The fixed-point residual needs an extra gradient, so test it on a
        # schedule (and whenever the iterates have almost stopped moving).
        if it % _RESIDUAL_CHECK_EVERY == 0 or step_norm <= 0.25 * tol:
            fp = w - project_scaled_simplex(w - step * grad(w), total)
            residual = float(np.sqrt(fp @ fp))
            if residual <= tol * max(1.0, float(np.sqrt(w @ w))):
                return weights_to_laplacian(w, n)
    raise ConvergenceError(
        f"projected gradient stalled at residual {residual:.3e}",
        residual=residual)
