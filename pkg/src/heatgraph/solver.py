"""PALM driver for joint recovery of (Laplacian, sparse codes, scales).

Minimizes

    ||X - D H||_F^2 + alpha * sum_m ||h_m||_1 + beta * ||L||_F^2,
    D = [exp(-tau_1 L) ... exp(-tau_S L)],

over valid trace-normalized Laplacians L, codes H and scales tau >= 0, by
proximal alternating linearized minimization: a soft-threshold step in H, a
weight-space QP step in L with a backtracked Lipschitz estimate, and a
closed-form projected gradient step in tau. One eigendecomposition of L per
outer iteration is shared by every kernel, gradient and trace evaluation.
"""

import json
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import qp
from .dictionary import build_dictionary, code_blocks, validate_taus
from .errors import ConfigError, NumericalError
from .graphs import random_valid_laplacian, threshold_laplacian
from .spectral import eig_sym, grad_trace_exp

_MAX_BACKTRACK = 100
_C2_MIN = 1e-8


@dataclass
class SolverConfig:
    """Knobs for one learn() run; defaults follow the reference experiments."""

    alpha: float = 0.01
    beta: float = 0.1
    tau_init: tuple = (2.5, 4.0)
    s_scales: Optional[int] = None  # inferred from tau_init when None
    gamma1: float = 1.1
    gamma2: float = 1.1
    gamma3: float = 1.1
    eta: float = 1.1
    max_outer_iter: int = 1000
    obj_tol: float = 1e-4
    laplacian_threshold: float = 1e-4
    learn_tau: bool = True
    rng_seed: int = 0
    qp_tol: float = qp.QP_TOL
    qp_max_iter: int = qp.QP_MAX_ITER
    checkpoint_every: Optional[int] = None
    checkpoint_dir: Optional[str] = None

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ConfigError("alpha and beta must be non-negative")
        if min(self.gamma1, self.gamma2, self.gamma3) <= 1 or self.eta <= 1:
            raise ConfigError("gamma1, gamma2, gamma3 and eta must exceed 1")
        if self.max_outer_iter < 1:
            raise ConfigError("max_outer_iter must be at least 1")
        taus = validate_taus(self.tau_init)
        if self.s_scales is None:
            self.s_scales = taus.size
        elif self.s_scales != taus.size:
            raise ConfigError(
                f"s_scales={self.s_scales} but tau_init has {taus.size} entries")
        if self.checkpoint_every is not None and self.checkpoint_every < 1:
            raise ConfigError("checkpoint_every must be a positive count")


@dataclass
class SolverState:
    """Mutable iterate carrier for one learn() run."""

    l: np.ndarray
    h: np.ndarray
    taus: np.ndarray
    eig: object
    dictionary: object
    c1: float = 0.0
    c2_estimate: Optional[float] = None
    objective_history: list = field(default_factory=list)
    iteration: int = 0
    descent_log: list = field(default_factory=list)  # (lhs, rhs) per L-step


@dataclass
class LearnResult:
    laplacian: np.ndarray
    codes: np.ndarray
    taus: np.ndarray
    objective_history: np.ndarray
    state: SolverState


def soft_threshold(z, thr):
    """Entry-wise shrinkage sign(z) * max(|z| - thr, 0)."""
    return np.sign(z) * np.maximum(np.abs(z) - thr, 0.0)


def data_misfit(x, dictionary, h):
    """The smooth fitting term ||X - D H||_F^2."""
    r = x - dictionary.apply(h)
    return float(np.sum(r * r))


def objective(x, state, cfg):
    """Full objective: misfit + alpha * ||H||_1 + beta * ||L||_F^2."""
    return (data_misfit(x, state.dictionary, state.h)
            + cfg.alpha * float(np.sum(np.abs(state.h)))
            + cfg.beta * float(np.sum(state.l * state.l)))


def grad_h(x, dictionary, h):
    """Gradient of the misfit in the codes: -2 D^T (X - D H), columnwise."""
    return -2.0 * dictionary.atoms.T @ (x - dictionary.apply(h))


def lipschitz_h(dictionary):
    """Global Lipschitz constant ||2 D^T D||_F of the H-gradient."""
    g = dictionary.gram()
    return 2.0 * float(np.linalg.norm(g))


def step_h(state, x, cfg):
    """Proximal (soft-threshold) update of the codes.

    Returns the new codes and the Lipschitz constant used for the step.
    """
    c1 = lipschitz_h(state.dictionary)
    c_t = cfg.gamma1 * c1
    z = state.h - grad_h(x, state.dictionary, state.h) / c_t
    return soft_threshold(z, cfg.alpha / c_t), c1


def grad_l(x, state):
    """Gradient of the misfit in L, assembled from exponential-trace terms.

    -2 sum_s d/dL tr(H_s X^T e^{-tau_s L})
      + sum_s sum_s' d/dL tr(H_s' H_s^T e^{-(tau_s + tau_s') L});
    symmetric (s, s') pairs contribute identical gradients, so the double
    sum is folded onto s <= s'.
    """
    n = state.l.shape[0]
    blocks = code_blocks(state.h, n)
    taus = state.taus
    g = np.zeros((n, n))
    for s, hs in enumerate(blocks):
        g -= 2.0 * grad_trace_exp(hs @ x.T, state.eig, -taus[s])
    for s, hs in enumerate(blocks):
        for sp in range(s, len(blocks)):
            term = grad_trace_exp(blocks[sp] @ hs.T, state.eig,
                                  -(taus[s] + taus[sp]))
            g += term if sp == s else 2.0 * term
    return g


def _initial_c2(state, cfg):
    """First-iteration curvature guess; later iterations reuse the running
    estimate, tentatively shrunk so steps do not stay conservative forever."""
    if state.c2_estimate is None:
        return max(1.0, state.c1 * float(np.max(state.taus)) ** 2)
    return max(state.c2_estimate / cfg.eta, _C2_MIN)


def step_l(state, x, cfg):
    """Backtracked proximal QP update of the Laplacian.

    Repeatedly solves the weight-space QP with d_t = gamma2 * C2, growing C2
    until the quadratic upper-bound (descent) condition holds, then returns
    (l_new, c2, eig_new, dict_new, misfit_new, lhs, rhs).
    """
    g = grad_l(x, state)
    z_prev = data_misfit(x, state.dictionary, state.h)
    c2 = _initial_c2(state, cfg)
    w_start = None
    for k in range(1, _MAX_BACKTRACK + 1):
        l_new = qp.solve_laplacian_qp(
            g, state.l, cfg.gamma2 * c2, cfg.beta,
            tol=cfg.qp_tol, max_iter=cfg.qp_max_iter, w_start=w_start)
        w_start = qp.laplacian_to_weights(l_new)
        eig_new = eig_sym(l_new)
        dict_new = build_dictionary(eig_new, state.taus)
        z_new = data_misfit(x, dict_new, state.h)
        delta = l_new - state.l
        rhs = (z_prev + float(np.sum(g * delta))
               + 0.5 * c2 * float(np.sum(delta * delta)))
        if z_new <= rhs + 1e-12 * max(1.0, abs(z_prev)):
            return l_new, c2, eig_new, dict_new, z_new, z_new, rhs
        c2 *= cfg.eta ** k
    raise NumericalError(
        f"descent condition still violated after {_MAX_BACKTRACK} "
        f"backtracking rounds (C2={c2:.3e})")


def grad_tau(x, state):
    """Gradient of the misfit in the scales, via spectral trace identities.

    tr(A L e^{-c L}) = sum_i lam_i e^{-c lam_i} (chi^T A chi)_ii, so only
    diagonal congruence coefficients of the trace factors are needed.
    """
    n = state.l.shape[0]
    chi, lam = state.eig.chi, state.eig.lam
    blocks = code_blocks(state.h, n)
    s_count = len(blocks)
    xt = chi.T @ x
    ht = [chi.T @ hs for hs in blocks]
    # Diagonal congruence coefficients of H_s X^T and H_s' H_s^T.
    dx = [np.sum(ht[s] * xt, axis=1) for s in range(s_count)]
    g = np.zeros(s_count)
    for s in range(s_count):
        g[s] = 2.0 * float(np.sum(lam * np.exp(-state.taus[s] * lam) * dx[s]))
        for sp in range(s_count):
            dhh = np.sum(ht[sp] * ht[s], axis=1)
            decay = np.exp(-(state.taus[s] + state.taus[sp]) * lam)
            g[s] -= 2.0 * float(np.sum(lam * decay * dhh))
    return g


def tau_lipschitz_bound(x, state):
    """Global curvature bound for the scale block.

    max over s' of ||L||_2^2 (2 ||H_s'||_F ||X||_F + 4 sum_s ||H_s'||_F ||H_s||_F).
    """
    n = state.l.shape[0]
    norms = np.array([np.linalg.norm(hs) for hs in code_blocks(state.h, n)])
    l2sq = float(state.eig.lam[-1]) ** 2
    x_norm = float(np.linalg.norm(x))
    per_sp = 2.0 * norms * x_norm + 4.0 * norms * norms.sum()
    return l2sq * float(np.max(per_sp))


def step_tau(state, x, cfg):
    """Closed-form projected gradient update of the scales."""
    g = grad_tau(x, state)
    e_t = cfg.gamma3 * tau_lipschitz_bound(x, state)
    if e_t <= 0.0:
        # Only possible with all-zero codes, where the gradient vanishes too.
        return state.taus.copy()
    return np.maximum(state.taus - g / e_t, 0.0)


def _write_checkpoint(state, cfg):
    from .io import save_matrix_csv  # deferred to avoid a hard io dependency

    os.makedirs(cfg.checkpoint_dir, exist_ok=True)
    lap_path = os.path.join(cfg.checkpoint_dir, "checkpoint_laplacian.csv")
    codes_path = os.path.join(cfg.checkpoint_dir, "checkpoint_codes.csv")
    save_matrix_csv(lap_path, state.l)
    save_matrix_csv(codes_path, state.h)
    payload = {
        "iteration": state.iteration,
        "objective_history": list(map(float, state.objective_history)),
        "taus": [float(t) for t in state.taus],
        "laplacian_csv_path": lap_path,
        "sparse_codes_csv_path": codes_path,
    }
    with open(os.path.join(cfg.checkpoint_dir, "checkpoint.json"), "w") as fh:
        json.dump(payload, fh, indent=2)


def learn(x, cfg, l_init=None):
    """Run the full alternating minimization until the objective stalls.

    H starts at zero; L starts at l_init or a random valid Laplacian; the
    final Laplacian is thresholded at cfg.laplacian_threshold.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ConfigError(f"signal matrix must be N x M with N, M >= 1, "
                          f"got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ConfigError("signal matrix has non-finite entries")
    n = x.shape[0]
    taus = validate_taus(cfg.tau_init)
    if l_init is None:
        l = random_valid_laplacian(n, cfg.rng_seed)
    else:
        l = np.asarray(l_init, dtype=float)
        if l.shape != (n, n):
            raise ConfigError("l_init does not match the signal dimension")
    eig = eig_sym(l)
    state = SolverState(
        l=l, h=np.zeros((n * taus.size, x.shape[1])), taus=taus,
        eig=eig, dictionary=build_dictionary(eig, taus))
    state.objective_history.append(objective(x, state, cfg))

    for it in range(1, cfg.max_outer_iter + 1):
        state.h, state.c1 = step_h(state, x, cfg)
        l_new, c2, eig_new, dict_new, _, lhs, rhs = step_l(state, x, cfg)
        state.l, state.c2_estimate = l_new, c2
        state.eig, state.dictionary = eig_new, dict_new
        state.descent_log.append((lhs, rhs))
        if cfg.learn_tau:
            state.taus = step_tau(state, x, cfg)
            state.dictionary = build_dictionary(state.eig, state.taus)
        state.iteration = it
        state.objective_history.append(objective(x, state, cfg))
        if cfg.checkpoint_every and it % cfg.checkpoint_every == 0:
            _write_checkpoint(state, cfg)
        if abs(state.objective_history[-1] - state.objective_history[-2]) \
                < cfg.obj_tol:
            break

    return LearnResult(
        laplacian=threshold_laplacian(state.l, cfg.laplacian_threshold),
        codes=state.h,
        taus=state.taus.copy(),
        objective_history=np.asarray(state.objective_history),
        state=state)
