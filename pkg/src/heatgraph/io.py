"""File formats: dense CSV matrices, edge lists, JSON reports and manifests.

Numeric CSV output always uses 17 significant digits so float64 values
round-trip exactly.
"""

import json
import os

import numpy as np

from .errors import ConfigError

CSV_FMT = "%.17g"


def save_matrix_csv(path, a):
    """Dense matrix as comma-separated rows, no header, full precision."""
    np.savetxt(path, np.atleast_2d(np.asarray(a, dtype=float)),
               fmt=CSV_FMT, delimiter=",")


def load_matrix_csv(path):
    """Load a dense no-header CSV matrix (always 2-D)."""
    try:
        return np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise ConfigError(f"malformed CSV matrix in {path}: {exc}") from exc


def save_edge_list_csv(path, w):
    """Undirected edge list 'src,dst,weight', one row per pair i < j."""
    w = np.asarray(w)
    iu, ju = np.triu_indices(w.shape[0], k=1)
    with open(path, "w") as fh:
        fh.write("src,dst,weight\n")
        for i, j in zip(iu, ju):
            if w[i, j] != 0.0:
                fh.write(f"{i},{j},{w[i, j]:.17g}\n")


def load_edge_list_csv(path, n=None):
    """Rebuild a weight matrix from an edge list written by save_edge_list_csv."""
    rows = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "src,dst,weight":
            raise ConfigError(f"unexpected edge-list header in {path}: {header!r}")
        for line in fh:
            if not line.strip():
                continue
            src, dst, weight = line.split(",")
            rows.append((int(src), int(dst), float(weight)))
    if n is None:
        n = 1 + max((max(i, j) for i, j, _ in rows), default=-1)
    w = np.zeros((n, n))
    for i, j, val in rows:
        w[i, j] = w[j, i] = val
    return w


def save_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_manifest(directory, command, config, seeds, extra=None):
    """Reproducibility record for an artifact directory."""
    from . import __version__

    payload = {
        "version": __version__,
        "command": command,
        "config": config,
        "seeds": list(map(int, np.atleast_1d(seeds))),
    }
    if extra:
        payload.update(extra)
    save_json(os.path.join(directory, "manifest.json"), payload)
    return payload
