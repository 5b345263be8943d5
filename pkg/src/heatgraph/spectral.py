"""Symmetric eigendecomposition, heat kernels, and exponential-trace gradients.

The heat kernel exp(-tau * L) is always evaluated spectrally from a cached
eigendecomposition of L, since the same decomposition also drives the
gradient of tr(A exp(nu * L)). That gradient follows the Daleckii-Krein
form: chi ((chi^T A^T chi) o B) chi^T with B the divided-difference matrix
of the exponential over pairs of eigenvalues.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

# Relative eigenvalue separation below which the raw divided difference
# (e^a - e^b)/(a - b) loses precision and the exact midpoint form is used.
_NEAR_EQUAL_REL = 1e-10


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Orthonormal eigenvectors (columns of chi) and nondecreasing eigenvalues."""

    chi: np.ndarray
    lam: np.ndarray

    @property
    def n(self):
        return self.lam.shape[0]

    def reconstruct(self):
        return (self.chi * self.lam) @ self.chi.T


def eig_sym(a, sym_tol=1e-9):
    """Eigendecomposition of a symmetric matrix.

    Raises ConfigError when the input deviates from symmetry by more than
    sym_tol; the symmetrized matrix is what actually gets decomposed.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigError(f"expected a square matrix, got shape {a.shape}")
    if np.max(np.abs(a - a.T)) > sym_tol:
        raise ConfigError("matrix is not symmetric")
    lam, chi = np.linalg.eigh((a + a.T) / 2.0)
    return EigenDecomposition(chi=chi, lam=lam)


def heat_kernel(eig, tau):
    """exp(-tau * L) from the eigendecomposition of L."""
    if tau < 0:
        raise ConfigError("diffusion scale tau must be non-negative")
    k = (eig.chi * np.exp(-tau * eig.lam)) @ eig.chi.T
    return (k + k.T) / 2.0


def _sinch(x):
    """sinh(x)/x, equal to 1 at 0; accurate for small arguments."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 + x * x / 6.0, np.sinh(safe) / safe)


def divided_difference_matrix(lam):
    """Divided differences of exp over all eigenvalue pairs.

    Entry (i, j) is (e^{lam_i} - e^{lam_j}) / (lam_i - lam_j), with the
    diagonal and near-coincident pairs evaluated through the equivalent
    midpoint form e^{(lam_i+lam_j)/2} * sinch((lam_i-lam_j)/2), which is
    exact in the equal limit and smooth through it.
    """
    lam = np.asarray(lam, dtype=float)
    diff = lam[:, None] - lam[None, :]
    scale = np.maximum(1.0, np.maximum(np.abs(lam)[:, None], np.abs(lam)[None, :]))
    near = np.abs(diff) < _NEAR_EQUAL_REL * scale
    exp_lam = np.exp(lam)
    raw = (exp_lam[:, None] - exp_lam[None, :]) / np.where(near, 1.0, diff)
    mid = np.exp((lam[:, None] + lam[None, :]) / 2.0) * _sinch(diff / 2.0)
    return np.where(near, mid, raw)


def grad_trace_exp(a, eig, nu):
    """Gradient of L -> tr(A exp(nu * L)) over symmetric perturbations of L.

    Returns nu * chi ((chi^T A_sym chi) o B(nu * lam)) chi^T, symmetric by
    construction; only the symmetric part of A contributes because the
    perturbation directions are symmetric.
    """
    n = eig.n
    if nu == 0.0:
        return np.zeros((n, n))
    a_sym = (np.asarray(a, dtype=float) + np.asarray(a).T) / 2.0
    b = divided_difference_matrix(nu * eig.lam)
    inner = eig.chi.T @ a_sym @ eig.chi
    g = nu * (eig.chi @ (inner * b) @ eig.chi.T)
    return (g + g.T) / 2.0
