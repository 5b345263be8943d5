"""Edge-recovery scoring of a learned graph against ground truth.

All metrics binarize the two graphs into edge sets over the n(n-1)/2 vertex
pairs. Degenerate cases score conservatively: an empty prediction never gets
credit for precision, and single-class pair partitions carry zero entropy.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigError
from .graphs import weights_from_laplacian

EDGE_EPS = 1e-4


@dataclass(frozen=True)
class EdgeRecoveryReport:
    precision: float
    recall: float
    f_measure: float
    nmi: float
    l2_weight_error: float

    def as_dict(self):
        return asdict(self)


def edge_set(l, eps=EDGE_EPS):
    """Unordered vertex pairs (i < j) whose coupling |L_ij| >= eps."""
    if eps < 0:
        raise ConfigError("edge threshold must be non-negative")
    l = np.asarray(l)
    iu, ju = np.triu_indices(l.shape[0], k=1)
    keep = np.abs(l[iu, ju]) >= eps
    return {(int(i), int(j)) for i, j in zip(iu[keep], ju[keep])}


def precision_recall_f(learned, truth):
    """Precision, recall and F-measure of a predicted edge set.

    Empty learned set gives precision 0; empty truth gives recall 0; the
    F-measure is 0 whenever its denominator vanishes.
    """
    hits = len(learned & truth)
    precision = hits / len(learned) if learned else 0.0
    recall = hits / len(truth) if truth else 0.0
    if precision + recall == 0.0:
        return precision, recall, 0.0
    return precision, recall, 2.0 * precision * recall / (precision + recall)


def _entropy(counts, total):
    h = 0.0
    for c in counts:
        if c:
            p = c / total
            h -= p * math.log(p)
    return h


def nmi_edge_partition(learned, truth, n):
    """NMI between the edge/non-edge labelings of all vertex pairs.

    I(A;B) / sqrt(H(A) H(B)) with natural logs. If either labeling is
    single-class its entropy is zero; then the score is 1 for identical
    single-class partitions and 0 otherwise.
    """
    if n < 2:
        raise ConfigError("need at least two vertices")
    total = n * (n - 1) // 2
    n11 = len(learned & truth)
    n10 = len(learned) - n11
    n01 = len(truth) - n11
    n00 = total - n11 - n10 - n01
    row = [n11 + n10, n01 + n00]  # learned: edge / non-edge
    col = [n11 + n01, n10 + n00]  # truth: edge / non-edge
    h_a = _entropy(row, total)
    h_b = _entropy(col, total)
    if h_a == 0.0 or h_b == 0.0:
        return 1.0 if (h_a == 0.0 and h_b == 0.0 and learned == truth) else 0.0
    mi = 0.0
    for nab, na, nb in (
            (n11, row[0], col[0]), (n10, row[0], col[1]),
            (n01, row[1], col[0]), (n00, row[1], col[1])):
        if nab:
            mi += (nab / total) * math.log(nab * total / (na * nb))
    # Roundoff can push the ratio a few ulp outside [0, 1].
    return min(max(mi / math.sqrt(h_a * h_b), 0.0), 1.0)


def _normalized_weights(l):
    l = np.asarray(l, dtype=float)
    tr = np.trace(l)
    if tr > 0.0:
        l = l * (l.shape[0] / tr)
    return weights_from_laplacian(l)


def l2_weight_error(learned, truth):
    """Frobenius distance between edge-weight matrices.

    Both Laplacians are trace-normalized first so the comparison is at a
    common graph volume; an edgeless input is compared as the zero matrix.
    """
    learned = np.asarray(learned)
    truth = np.asarray(truth)
    if learned.shape != truth.shape:
        raise ConfigError("Laplacians have different sizes")
    return float(np.linalg.norm(_normalized_weights(learned)
                                - _normalized_weights(truth)))


def evaluate_recovery(l_learned, l_truth, eps=EDGE_EPS):
    """Full edge-recovery report for a learned Laplacian."""
    l_learned = np.asarray(l_learned)
    l_truth = np.asarray(l_truth)
    if l_learned.shape != l_truth.shape:
        raise ConfigError("Laplacians have different sizes")
    learned = edge_set(l_learned, eps)
    truth = edge_set(l_truth, eps)
    p, r, f = precision_recall_f(learned, truth)
    return EdgeRecoveryReport(
        precision=p, recall=r, f_measure=f,
        nmi=nmi_edge_partition(learned, truth, l_learned.shape[0]),
        l2_weight_error=l2_weight_error(l_learned, l_truth))
