"""Graph and Laplacian primitives.

Graphs are undirected and weighted, stored as dense symmetric weight
matrices with zero diagonal. The combinatorial Laplacian L = D - W is the
learned object everywhere else in the package; the helpers here construct,
validate, normalize and threshold it, and provide the three random-graph
models used as synthetic ground truth.
"""

import numpy as np

from .errors import ConfigError, ConnectivityError, DegenerateGraphError
from .rng import rng_from_seed

RBF_SIGMA = 0.5
RBF_KAPPA = 0.75
ER_EDGE_PROB = 0.2
LAPLACIAN_EPS = 1e-4

_MAX_CONNECT_ATTEMPTS = 100


def validate_weight_matrix(w, tol=0.0):
    """Raise ConfigError unless w is a valid weight matrix.

    Checks: square, symmetric, non-negative, zero diagonal.
    """
    w = np.asarray(w)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ConfigError(f"weight matrix must be square, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ConfigError("weight matrix has non-finite entries")
    if np.max(np.abs(w - w.T)) > tol:
        raise ConfigError("weight matrix is not symmetric")
    if np.min(w) < -tol:
        raise ConfigError("weight matrix has negative entries")
    if np.max(np.abs(np.diag(w))) > tol:
        raise ConfigError("weight matrix has non-zero diagonal entries")


def validate_laplacian(l, row_sum_tol=1e-9, check_trace=False, trace_tol=1e-9,
                       psd_tol=1e-9):
    """Raise ConfigError unless l is a valid combinatorial Laplacian.

    Checks symmetry, non-positive off-diagonals, zero row sums and positive
    semidefiniteness; with check_trace also trace == n (relative tolerance).
    """
    l = np.asarray(l)
    n = l.shape[0]
    if l.ndim != 2 or l.shape[1] != n:
        raise ConfigError(f"Laplacian must be square, got shape {l.shape}")
    if np.max(np.abs(l - l.T)) > row_sum_tol:
        raise ConfigError("Laplacian is not symmetric")
    off = l - np.diag(np.diag(l))
    if np.max(off) > row_sum_tol:
        raise ConfigError("Laplacian has positive off-diagonal entries")
    if np.max(np.abs(l.sum(axis=1))) > row_sum_tol:
        raise ConfigError("Laplacian rows do not sum to zero")
    if check_trace and abs(np.trace(l) - n) > trace_tol * n:
        raise ConfigError(f"Laplacian trace {np.trace(l)} != {n}")
    if np.linalg.eigvalsh(l)[0] < -psd_tol:
        raise ConfigError("Laplacian is not positive semidefinite")


def laplacian_from_weights(w):
    """Combinatorial Laplacian L = D - W with exactly zero row sums."""
    w = np.asarray(w, dtype=float)
    l = -w.copy()
    # Diagonal set from the off-diagonal row sums so L @ 1 == 0 identically.
    np.fill_diagonal(l, 0.0)
    np.fill_diagonal(l, -l.sum(axis=1))
    return l


def weights_from_laplacian(l):
    """Edge weights W = -L with the diagonal zeroed."""
    w = -np.asarray(l, dtype=float).copy()
    np.fill_diagonal(w, 0.0)
    return w


def normalize_trace(l):
    """Rescale a Laplacian so its trace equals the number of vertices."""
    l = np.asarray(l, dtype=float)
    n = l.shape[0]
    tr = np.trace(l)
    if tr <= 0.0:
        raise DegenerateGraphError("cannot trace-normalize a graph with no edges")
    return l * (n / tr)


def threshold_laplacian(l, eps=LAPLACIAN_EPS):
    """Zero off-diagonal entries below eps in magnitude; rebuild the diagonal."""
    if eps < 0:
        raise ConfigError("threshold must be non-negative")
    w = weights_from_laplacian(l)
    w[np.abs(w) < eps] = 0.0
    return laplacian_from_weights(w)


def is_connected(w):
    """Breadth-first connectivity check on the non-zero pattern of w."""
    w = np.asarray(w)
    n = w.shape[0]
    if n == 0:
        return False
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        i = stack.pop()
        for j in np.flatnonzero(w[i]):
            if not seen[j]:
                seen[j] = True
                stack.append(j)
    return bool(seen.all())


def _draw_connected(draw, rng, require_connected=True):
    if not require_connected:
        return draw(rng)
    for _ in range(_MAX_CONNECT_ATTEMPTS):
        w = draw(rng)
        if is_connected(w):
            return w
    raise ConnectivityError(
        f"no connected graph after {_MAX_CONNECT_ATTEMPTS} draws")


def rbf_weights_from_coords(coords, sigma=RBF_SIGMA, kappa=RBF_KAPPA):
    """Thresholded Gaussian-kernel weights for given vertex coordinates."""
    coords = np.asarray(coords, dtype=float)
    dist = np.linalg.norm(coords[:, None, :] - coords[None, :, :], axis=2)
    w = np.where(dist <= kappa, np.exp(-dist ** 2 / (2.0 * sigma ** 2)), 0.0)
    np.fill_diagonal(w, 0.0)
    return w


def generate_rbf_graph(n, sigma=RBF_SIGMA, kappa=RBF_KAPPA, rng_seed=0,
                       return_coords=False, require_connected=True):
    """Random geometric graph: vertices uniform in the unit square, edge
    weights exp(-dist^2 / 2 sigma^2) for pairs within distance kappa.

    Redraws coordinates (up to 100 attempts) until the graph is connected,
    unless require_connected is False.
    """
    if sigma <= 0 or kappa <= 0:
        raise ConfigError("sigma and kappa must be positive")
    rng = rng_from_seed(rng_seed)
    coords = None

    def draw(rng):
        nonlocal coords
        coords = rng.uniform(0.0, 1.0, size=(n, 2))
        return rbf_weights_from_coords(coords, sigma, kappa)

    w = _draw_connected(draw, rng, require_connected)
    if return_coords:
        return w, coords
    return w


def generate_er_graph(n, p=ER_EDGE_PROB, rng_seed=0, require_connected=True):
    """Erdos-Renyi graph: each unordered pair is a unit-weight edge with
    probability p, independently. Redraws until connected unless
    require_connected is False."""
    if not 0.0 < p < 1.0:
        raise ConfigError("edge probability must lie strictly in (0, 1)")

    def draw(rng):
        w = np.zeros((n, n))
        iu, ju = np.triu_indices(n, k=1)
        mask = rng.uniform(size=iu.size) < p
        w[iu[mask], ju[mask]] = 1.0
        return w + w.T

    return _draw_connected(draw, rng_from_seed(rng_seed), require_connected)


def generate_ba_graph(n, m_attach=1, rng_seed=0):
    """Barabasi-Albert preferential-attachment graph with unit weights.

    Starts from a complete graph on m_attach vertices; every added vertex
    connects to m_attach distinct existing vertices chosen with probability
    proportional to their current degree (uniformly while all degrees are
    zero, which only happens for the m_attach == 1 seed vertex).
    """
    if not 1 <= m_attach < n:
        raise ConfigError("need 1 <= m_attach < n")
    rng = rng_from_seed(rng_seed)
    w = np.zeros((n, n))
    w[:m_attach, :m_attach] = 1.0
    np.fill_diagonal(w, 0.0)
    degree = w.sum(axis=1)
    for v in range(m_attach, n):
        existing = degree[:v]
        if existing.sum() == 0.0:
            prob = np.full(v, 1.0 / v)
        else:
            prob = existing / existing.sum()
        targets = rng.choice(v, size=m_attach, replace=False, p=prob)
        for t in targets:
            w[v, t] = w[t, v] = 1.0
            degree[t] += 1.0
            degree[v] += 1.0
    return w


def random_valid_laplacian(n, rng_seed=0):
    """Random valid trace-normalized Laplacian, used as solver initialization.

    Draws an ER(p=0.5) pattern with uniform(0,1) weights (redrawn until
    connected), then normalizes the trace to n.
    """
    if n < 2:
        raise ConfigError("need at least two vertices")

    def draw(rng):
        w = np.zeros((n, n))
        iu, ju = np.triu_indices(n, k=1)
        mask = rng.uniform(size=iu.size) < 0.5
        vals = rng.uniform(size=iu.size)
        w[iu[mask], ju[mask]] = vals[mask]
        return w + w.T

    w = _draw_connected(draw, rng_from_seed(rng_seed))
    return normalize_trace(laplacian_from_weights(w))
