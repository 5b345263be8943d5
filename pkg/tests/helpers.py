"""Shared fixtures-by-hand for the test suite: random instances and oracles."""

import numpy as np

from heatgraph.dictionary import build_dictionary
from heatgraph.graphs import (generate_rbf_graph, laplacian_from_weights,
                              normalize_trace)
from heatgraph.spectral import eig_sym


def random_symmetric(n, rng, scale=1.0):
    a = rng.standard_normal((n, n)) * scale
    return (a + a.T) / 2.0


def random_laplacian(n, rng):
    """Random connected-ish valid Laplacian with uniform weights, normalized."""
    w = np.zeros((n, n))
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.uniform(size=iu.size) < 0.6
    vals = rng.uniform(0.2, 1.0, size=iu.size)
    w[iu[mask], ju[mask]] = vals[mask]
    w += w.T
    if not w.sum():
        w[0, 1] = w[1, 0] = 1.0
    return normalize_trace(laplacian_from_weights(w))


def rbf_laplacian(n=20, seed=0):
    w = generate_rbf_graph(n, rng_seed=seed)
    return normalize_trace(laplacian_from_weights(w))


def taylor_heat_kernel(l, tau, terms=60):
    """Truncated Taylor series sum_{k<=terms} (-tau L)^k / k!."""
    n = l.shape[0]
    acc = np.eye(n)
    term = np.eye(n)
    for k in range(1, terms + 1):
        term = term @ (-tau * l) / k
        acc = acc + term
    return acc


def scaled_taylor_heat_kernel(l, tau, terms=60):
    """Taylor oracle with scaling and squaring for well-conditioned sums."""
    norm = np.linalg.norm(l, 2) * tau
    j = max(0, int(np.ceil(np.log2(max(norm, 1e-30) / 0.5))))
    k = taylor_heat_kernel(l, tau / 2 ** j, terms)
    for _ in range(j):
        k = k @ k
    return k


def misfit_of_laplacian(x, l, taus, h):
    """Data term ||X - D(L) H||_F^2 rebuilt from scratch (test oracle)."""
    d = build_dictionary(eig_sym(l), taus)
    r = x - d.apply(h)
    return float(np.sum(r * r))


def central_diff(f, x0, direction, step):
    return (f(x0 + step * direction) - f(x0 - step * direction)) / (2 * step)
