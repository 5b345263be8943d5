"""Multi-scale heat-diffusion dictionaries and synthetic signal generation.

A dictionary is the horizontal concatenation of S heat kernels
[exp(-tau_1 L) ... exp(-tau_S L)] built on one cached eigendecomposition.
Atom k of block s is the diffusion pattern of a unit source at vertex
k after time tau_s.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .rng import rng_from_seed
from .spectral import EigenDecomposition, heat_kernel

REFERENCE_NOISE_STD = 0.02  # ~13 dB SNR on the reference synthetic setup


def validate_taus(taus):
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if taus.ndim != 1 or taus.size < 1:
        raise ConfigError("need at least one diffusion scale")
    if np.any(taus < 0) or not np.all(np.isfinite(taus)):
        raise ConfigError("diffusion scales must be finite and non-negative")
    return taus


@dataclass(frozen=True, eq=False)
class HeatDictionary:
    """Concatenated heat kernels with their source eigendecomposition."""

    eig: EigenDecomposition
    taus: np.ndarray
    atoms: np.ndarray  # n x (n * n_scales)

    @property
    def n(self):
        return self.atoms.shape[0]

    @property
    def n_scales(self):
        return self.taus.shape[0]

    def block(self, s):
        """Heat kernel block for scale s (a view into atoms)."""
        n = self.n
        return self.atoms[:, s * n:(s + 1) * n]

    def apply(self, h):
        """Synthesize signals X = sum_s exp(-tau_s L) H_s from codes h."""
        h = np.asarray(h, dtype=float)
        if h.shape[0] != self.atoms.shape[1]:
            raise ConfigError(
                f"codes have {h.shape[0]} rows, dictionary has "
                f"{self.atoms.shape[1]} atoms")
        return self.atoms @ h

    def gram(self):
        """D^T D assembled blockwise as exp(-(tau_s + tau_s') L).

        The semigroup identity turns the S^2 dense products into S^2 kernel
        evaluations on the cached eigendecomposition.
        """
        n, s = self.n, self.n_scales
        g = np.empty((n * s, n * s))
        for a in range(s):
            for b in range(a, s):
                block = heat_kernel(self.eig, self.taus[a] + self.taus[b])
                g[a * n:(a + 1) * n, b * n:(b + 1) * n] = block
                if b != a:
                    g[b * n:(b + 1) * n, a * n:(a + 1) * n] = block.T
        return g


def build_dictionary(eig, taus):
    """Assemble the heat dictionary for the given scales."""
    taus = validate_taus(taus)
    atoms = np.hstack([heat_kernel(eig, t) for t in taus])
    return HeatDictionary(eig=eig, taus=taus, atoms=atoms)


def code_blocks(h, n):
    """Iterate over the per-scale N x M blocks H_s of a code matrix."""
    h = np.asarray(h)
    if h.shape[0] % n:
        raise ConfigError("code rows are not a multiple of the vertex count")
    return [h[s * n:(s + 1) * n] for s in range(h.shape[0] // n)]


def generate_synthetic_signals(dictionary, m, atoms_per_signal=3,
                               noise_std=0.0, rng_seed=0):
    """Random sparse combinations of dictionary atoms, plus Gaussian noise.

    Every column of H carries atoms_per_signal non-zeros at distinct uniform
    positions with standard-normal values; X = D H + noise. Returns (X, H).
    """
    n_atoms = dictionary.atoms.shape[1]
    if not 1 <= atoms_per_signal <= n_atoms:
        raise ConfigError("atoms_per_signal must lie in [1, n_atoms]")
    if m < 1:
        raise ConfigError("need at least one signal")
    if noise_std < 0:
        raise ConfigError("noise_std must be non-negative")
    rng = rng_from_seed(rng_seed)
    h = np.zeros((n_atoms, m))
    for col in range(m):
        support = rng.choice(n_atoms, size=atoms_per_signal, replace=False)
        h[support, col] = rng.standard_normal(atoms_per_signal)
    x = dictionary.apply(h)
    if noise_std > 0:
        x = x + noise_std * rng.standard_normal(x.shape)
    return x, h
