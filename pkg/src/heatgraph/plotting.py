"""Figure rendering for experiment reports.

Every report-producing command drops a small set of PNGs next to its CSV and
JSON output so runs can be eyeballed without an external plotting step.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def save_objective_curve(history, path, title="Objective"):
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.semilogy(np.arange(len(history)), np.asarray(history, dtype=float))
    ax.set_xlabel("outer iteration")
    ax.set_ylabel("objective")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_matrix_heatmap(a, path, title=""):
    fig, ax = plt.subplots(figsize=(4.4, 4))
    im = ax.imshow(np.asarray(a, dtype=float), cmap="viridis")
    fig.colorbar(im, ax=ax, fraction=0.046)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_grid_heatmap(alphas, betas, values, path, title="F-measure"):
    """Score over the (alpha, beta) grid; rows are alphas."""
    fig, ax = plt.subplots(figsize=(5, 4))
    vals = np.asarray(values, dtype=float)
    im = ax.imshow(vals, cmap="magma", aspect="auto", vmin=0.0,
                   vmax=max(1.0, np.nanmax(vals)))
    ax.set_yticks(range(len(alphas)),
                  [f"{a:.3g}" for a in alphas], fontsize=7)
    ax.set_xticks(range(len(betas)), [f"{b:.3g}" for b in betas], fontsize=8)
    ax.set_ylabel("alpha")
    ax.set_xlabel("beta")
    ax.set_title(title)
    fig.colorbar(im, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_localization_trend(rows, path):
    """Mean support F-measure and mean recovered sources against tau."""
    taus = sorted({r.tau for r in rows})
    f_means = [np.mean([r.support_f_measure for r in rows if r.tau == t])
               for t in taus]
    s_means = [np.mean([r.mean_sources_recovered for r in rows if r.tau == t])
               for t in taus]
    fig, axes = plt.subplots(1, 2, figsize=(8, 3.2))
    axes[0].semilogx(taus, f_means, "o-")
    axes[0].set_xlabel("tau")
    axes[0].set_ylabel("support F-measure")
    axes[1].semilogx(taus, s_means, "s-", color="tab:red")
    axes[1].set_xlabel("tau")
    axes[1].set_ylabel("sources recovered")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_sparsity_error_curve(nnz_levels, errors, path,
                              title="Approximation error vs sparsity"):
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(nnz_levels, errors, "o-")
    ax.set_xlabel("non-zeros in H")
    ax.set_ylabel("||X - D H||_F^2")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
