import numpy as np
import pytest

from helpers import rbf_laplacian
from heatgraph.dictionary import (REFERENCE_NOISE_STD, build_dictionary,
                                  code_blocks, generate_synthetic_signals)
from heatgraph.errors import ConfigError
from heatgraph.spectral import eig_sym


def test_single_scale_zero_tau_is_identity():
    eig = eig_sym(rbf_laplacian(8, seed=1))
    d = build_dictionary(eig, [0.0])
    assert np.allclose(d.atoms, np.eye(8), atol=1e-12)


def test_reference_two_scale_dictionary():
    eig = eig_sym(rbf_laplacian(20, seed=2))
    d = build_dictionary(eig, (2.5, 4.0))
    assert d.atoms.shape == (20, 40)
    for s in range(2):
        block = d.block(s)
        assert np.allclose(block, block.T, atol=1e-12)
        assert np.linalg.eigvalsh(block)[0] > 0.0
        # Heat kernels of a valid Laplacian preserve constants.
        assert np.max(np.abs(block.sum(axis=1) - 1.0)) < 1e-8


def test_atom_norms_are_contractions():
    eig = eig_sym(rbf_laplacian(12, seed=3))
    d = build_dictionary(eig, (0.5, 2.0))
    assert np.all(np.linalg.norm(d.atoms, axis=0) <= 1.0 + 1e-12)


def test_apply_zero_and_identity():
    eig = eig_sym(rbf_laplacian(6, seed=4))
    d = build_dictionary(eig, [0.0])
    h = np.zeros((6, 3))
    assert np.array_equal(d.apply(h), np.zeros((6, 3)))
    h = np.random.default_rng(0).standard_normal((6, 3))
    assert np.allclose(d.apply(h), h, atol=1e-12)


def test_apply_matches_dense_product():
    rng = np.random.default_rng(1)
    d = build_dictionary(eig_sym(rbf_laplacian(7, seed=5)), (1.0, 3.0))
    h = rng.standard_normal((14, 5))
    assert np.max(np.abs(d.apply(h) - d.atoms @ h)) < 1e-10


def test_apply_is_linear():
    rng = np.random.default_rng(2)
    d = build_dictionary(eig_sym(rbf_laplacian(6, seed=6)), (0.7, 1.4))
    h1, h2 = rng.standard_normal((2, 12, 4))
    lhs = d.apply(2.0 * h1 - 3.0 * h2)
    rhs = 2.0 * d.apply(h1) - 3.0 * d.apply(h2)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_apply_rejects_bad_shape():
    d = build_dictionary(eig_sym(rbf_laplacian(6, seed=6)), (0.7,))
    with pytest.raises(ConfigError):
        d.apply(np.zeros((7, 2)))


def test_gram_identity_at_zero_tau():
    d = build_dictionary(eig_sym(rbf_laplacian(5, seed=7)), [0.0])
    assert np.allclose(d.gram(), np.eye(5), atol=1e-12)


@pytest.mark.parametrize("taus", [(0.8,), (0.8, 2.5), (0.5, 1.5, 4.0)])
def test_gram_fast_path_matches_dense(taus):
    d = build_dictionary(eig_sym(rbf_laplacian(8, seed=8)), taus)
    g = d.gram()
    assert np.linalg.norm(g - d.atoms.T @ d.atoms) < 1e-9
    assert np.max(np.abs(g - g.T)) < 1e-12
    assert np.linalg.eigvalsh(g)[0] > -1e-10


def test_gram_cross_block_is_summed_scale_kernel():
    from heatgraph.spectral import heat_kernel
    eig = eig_sym(rbf_laplacian(6, seed=9))
    d = build_dictionary(eig, (1.0, 2.0))
    g = d.gram()
    assert np.linalg.norm(g[:6, 6:] - heat_kernel(eig, 3.0)) < 1e-9


def test_synthetic_signals_exact_and_sparse():
    d = build_dictionary(eig_sym(rbf_laplacian(20, seed=10)), (2.5, 4.0))
    x, h = generate_synthetic_signals(d, 100, atoms_per_signal=3,
                                      noise_std=0.0, rng_seed=11)
    assert x.shape == (20, 100) and h.shape == (40, 100)
    assert np.all(np.count_nonzero(h, axis=0) == 3)
    assert np.max(np.abs(x - d.apply(h))) == 0.0


def test_synthetic_signals_reproducible():
    d = build_dictionary(eig_sym(rbf_laplacian(10, seed=12)), (2.5, 4.0))
    a = generate_synthetic_signals(d, 7, noise_std=0.1, rng_seed=5)
    b = generate_synthetic_signals(d, 7, noise_std=0.1, rng_seed=5)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    c = generate_synthetic_signals(d, 7, noise_std=0.1, rng_seed=6)
    assert not np.array_equal(a[0], c[0])


def test_reference_noise_level_snr():
    # The reference noisy configuration sits near 13 dB SNR.
    snrs = []
    for seed in range(10):
        d = build_dictionary(eig_sym(rbf_laplacian(20, seed=100 + seed)),
                             (2.5, 4.0))
        x, h = generate_synthetic_signals(d, 100, atoms_per_signal=3,
                                          noise_std=0.0, rng_seed=seed)
        snrs.append(10 * np.log10(np.mean(x ** 2) / REFERENCE_NOISE_STD ** 2))
    assert abs(np.mean(snrs) - 13.0) < 2.0


def test_code_blocks_partition():
    h = np.arange(12.0).reshape(6, 2)
    blocks = code_blocks(h, 3)
    assert len(blocks) == 2
    assert np.array_equal(np.vstack(blocks), h)
    with pytest.raises(ConfigError):
        code_blocks(h, 4)
