"""Experiment orchestration: synthetic datasets, learning grids, sweeps.

A synthetic instance is fully determined by (model, seed, config); the three
uses of randomness (graph draw, signal draw, solver initialization) get
namespaced child seeds so cells can run out of order or in parallel without
changing results.
"""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from . import graphs, io
from .dictionary import build_dictionary, generate_synthetic_signals
from .errors import ConfigError
from .metrics import evaluate_recovery
from .rng import derive_seed
from .solver import SolverConfig, learn
from .spectral import eig_sym

GRAPH_MODELS = ("rbf", "er", "ba", "from_file")

# Seed namespaces for the independent random draws of one instance.
_K_GRAPH, _K_SIGNALS, _K_INIT = 0, 1, 2


def default_alpha_grid():
    """Multiplicative grid from 10 down to 1e-6 by factors of 10^-0.5."""
    return [float(10.0 ** e) for e in np.arange(1.0, -6.25, -0.5)]


def default_beta_grid():
    """Multiplicative grid 1, 0.1, 0.01."""
    return [float(10.0 ** e) for e in (0.0, -1.0, -2.0)]


def default_taus_true(graph_model):
    return (1.0, 4.0) if graph_model == "ba" else (2.5, 4.0)


@dataclass
class ExperimentConfig:
    """End-to-end settings for the synthetic pipeline."""

    graph_model: str = "rbf"
    n: int = 20
    taus_true: tuple = None  # model-dependent default
    m_signals: int = 100
    atoms_per_signal: int = 3
    noise_std: float = 0.0
    alpha_grid: list = field(default_factory=default_alpha_grid)
    beta_grid: list = field(default_factory=default_beta_grid)
    seeds: tuple = (0,)
    solver: dict = field(default_factory=dict)
    output_dir: str = None

    def __post_init__(self):
        if self.graph_model not in GRAPH_MODELS:
            raise ConfigError(f"unknown graph model {self.graph_model!r}; "
                              f"expected one of {GRAPH_MODELS}")
        if self.taus_true is None:
            self.taus_true = default_taus_true(self.graph_model)
        self.taus_true = tuple(float(t) for t in np.atleast_1d(self.taus_true))
        if not len(self.alpha_grid) or not len(self.beta_grid):
            raise ConfigError("alpha and beta grids must be non-empty")
        if not len(self.seeds):
            raise ConfigError("need at least one seed")
        self.seeds = tuple(int(s) for s in self.seeds)

    @classmethod
    def from_dict(cls, raw):
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    def solver_config(self, alpha, beta, seed):
        opts = dict(self.solver)
        opts.setdefault("tau_init", self.taus_true)
        opts.pop("alpha", None)
        opts.pop("beta", None)
        opts.pop("rng_seed", None)
        return SolverConfig(alpha=alpha, beta=beta,
                            rng_seed=derive_seed(seed, _K_INIT), **opts)


def generate_truth_graph(model, n, seed, **kwargs):
    """Ground-truth weight matrix and trace-normalized Laplacian."""
    gseed = derive_seed(seed, _K_GRAPH)
    if model == "rbf":
        w = graphs.generate_rbf_graph(n, rng_seed=gseed, **kwargs)
    elif model == "er":
        w = graphs.generate_er_graph(n, rng_seed=gseed, **kwargs)
    elif model == "ba":
        w = graphs.generate_ba_graph(n, rng_seed=gseed, **kwargs)
    else:
        raise ConfigError(f"graph model {model!r} cannot be sampled")
    return w, graphs.normalize_trace(graphs.laplacian_from_weights(w))


def synthetic_instance(cfg, seed):
    """One ground-truth graph plus its signal set for the given seed.

    Returns (w_truth, l_truth, x, h_true).
    """
    w, l = generate_truth_graph(cfg.graph_model, cfg.n, seed)
    dictionary = build_dictionary(eig_sym(l), cfg.taus_true)
    x, h = generate_synthetic_signals(
        dictionary, cfg.m_signals, atoms_per_signal=cfg.atoms_per_signal,
        noise_std=cfg.noise_std, rng_seed=derive_seed(seed, _K_SIGNALS))
    return w, l, x, h


def _recovery_cell(payload):
    """Worker: one (seed, alpha, beta) learning run scored against truth."""
    cfg, seed, alpha, beta = payload
    _, l_truth, x, _ = synthetic_instance(cfg, seed)
    result = learn(x, cfg.solver_config(alpha, beta, seed))
    report = evaluate_recovery(result.laplacian, l_truth)
    return {
        "seed": seed, "alpha": alpha, "beta": beta,
        "iterations": int(result.state.iteration),
        "objective": float(result.objective_history[-1]),
        "taus": [float(t) for t in result.taus],
        **report.as_dict(),
    }


def run_recovery_experiment(cfg, jobs=1):
    """All (alpha, beta, seed) cells of the synthetic recovery protocol.

    Deterministic cell order: alpha outer, beta inner, seeds innermost.
    Returns the flat list of per-cell score dicts.
    """
    cells = [(cfg, seed, alpha, beta)
             for alpha in cfg.alpha_grid
             for beta in cfg.beta_grid
             for seed in cfg.seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_recovery_cell, cells, chunksize=1))
    return [_recovery_cell(c) for c in cells]


def summarize_grid(results):
    """Mean scores per (alpha, beta) cell and the best cell by F-measure.

    Returns (per_cell, best) where per_cell maps (alpha, beta) to a dict of
    mean metrics over seeds.
    """
    per_cell = {}
    for r in results:
        per_cell.setdefault((r["alpha"], r["beta"]), []).append(r)
    summary = {}
    for key, rows in per_cell.items():
        summary[key] = {
            "f_measure": float(np.mean([r["f_measure"] for r in rows])),
            "precision": float(np.mean([r["precision"] for r in rows])),
            "recall": float(np.mean([r["recall"] for r in rows])),
            "nmi": float(np.mean([r["nmi"] for r in rows])),
            "l2_weight_error": float(np.mean([r["l2_weight_error"]
                                              for r in rows])),
            "n_seeds": len(rows),
        }
    best_key = max(summary, key=lambda k: summary[k]["f_measure"])
    best = {"alpha": best_key[0], "beta": best_key[1], **summary[best_key]}
    return summary, best


def _learn_cell_worker(payload):
    """Worker for cmd_learn grids: fixed signals, per-cell solver config."""
    (x, l_truth, alpha, beta, seed, solver_opts, cell_dir) = payload
    opts = dict(solver_opts)
    opts.pop("alpha", None)
    opts.pop("beta", None)
    opts.pop("rng_seed", None)
    cfg = SolverConfig(alpha=alpha, beta=beta,
                       rng_seed=derive_seed(seed, _K_INIT), **opts)
    result = learn(x, cfg)
    os.makedirs(cell_dir, exist_ok=True)
    io.save_matrix_csv(os.path.join(cell_dir, "laplacian_learned.csv"),
                       result.laplacian)
    io.save_matrix_csv(os.path.join(cell_dir, "objective_history.csv"),
                       result.objective_history.reshape(-1, 1))
    record = {
        "alpha": alpha, "beta": beta, "seed": seed,
        "iterations": int(result.state.iteration),
        "objective": float(result.objective_history[-1]),
        "taus": [float(t) for t in result.taus],
    }
    if l_truth is not None:
        report = evaluate_recovery(result.laplacian, l_truth).as_dict()
        record.update(report)
        io.save_json(os.path.join(cell_dir, "report.json"), report)
    io.save_json(os.path.join(cell_dir, "result.json"), record)
    return record


def cell_dir_name(i_alpha, i_beta, seed):
    return f"alpha{i_alpha:02d}_beta{i_beta:02d}_seed{seed}"


def run_learn_grid(x, l_truth, alphas, betas, seeds, solver_opts, outdir,
                   jobs=1):
    """Learning grid over fixed signals; resumable by cell directory.

    Cells whose result.json already exists are loaded instead of re-run.
    Returns the list of per-cell records in deterministic order.
    """
    pending, done = [], {}
    order = []
    for ia, alpha in enumerate(alphas):
        for ib, beta in enumerate(betas):
            for seed in seeds:
                cell = cell_dir_name(ia, ib, seed)
                order.append(cell)
                cell_dir = os.path.join(outdir, cell)
                marker = os.path.join(cell_dir, "result.json")
                if os.path.exists(marker):
                    done[cell] = io.load_json(marker)
                else:
                    pending.append((cell, (x, l_truth, float(alpha),
                                           float(beta), seed, solver_opts,
                                           cell_dir)))
    if jobs > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for (cell, _), rec in zip(
                    pending, pool.map(_learn_cell_worker,
                                      [p for _, p in pending], chunksize=1)):
                done[cell] = rec
    else:
        for cell, payload in pending:
            done[cell] = _learn_cell_worker(payload)
    return [done[c] for c in order]
