import itertools
import math

import numpy as np
import pytest

from helpers import rbf_laplacian
from heatgraph.graphs import laplacian_from_weights
from heatgraph.metrics import (EdgeRecoveryReport, edge_set, evaluate_recovery,
                               l2_weight_error, nmi_edge_partition,
                               precision_recall_f)


def complete_edges(n):
    return set(itertools.combinations(range(n), 2))


def test_edge_set_complete_and_empty():
    n = 6
    w = np.ones((n, n)) - np.eye(n)
    assert edge_set(laplacian_from_weights(w)) == complete_edges(n)
    assert edge_set(np.zeros((n, n))) == set()


def test_edge_set_matches_rescan():
    l = rbf_laplacian(10, seed=0)
    got = edge_set(l, eps=1e-4)
    for i in range(10):
        for j in range(i + 1, 10):
            assert ((i, j) in got) == (abs(l[i, j]) >= 1e-4)


def test_precision_recall_f_basics():
    e = complete_edges(5)
    assert precision_recall_f(e, e) == (1.0, 1.0, 1.0)
    a = {(0, 1), (0, 2)}
    b = {(1, 2), (3, 4)}
    assert precision_recall_f(a, b) == (0.0, 0.0, 0.0)


def test_precision_recall_f_hand_case():
    truth = {(0, i) for i in range(1, 11)}            # 10 edges
    learned = {(0, i) for i in range(1, 7)} | {(1, 2), (1, 3)}  # 8, 6 hits
    p, r, f = precision_recall_f(learned, truth)
    assert p == pytest.approx(0.75)
    assert r == pytest.approx(0.6)
    assert f == pytest.approx(2 * 0.75 * 0.6 / 1.35)


def test_precision_recall_empty_conventions():
    truth = {(0, 1)}
    assert precision_recall_f(set(), truth) == (0.0, 0.0, 0.0)
    assert precision_recall_f(truth, set()) == (0.0, 0.0, 0.0)


def test_nmi_identical_partitions():
    learned = {(0, 1), (2, 3)}
    assert nmi_edge_partition(learned, set(learned), 5) == pytest.approx(1.0)


def test_nmi_degenerate_single_class():
    n = 5
    assert nmi_edge_partition(set(), set(), n) == 1.0
    assert nmi_edge_partition(complete_edges(n), complete_edges(n), n) == 1.0
    assert nmi_edge_partition(set(), complete_edges(n), n) == 0.0
    assert nmi_edge_partition(set(), {(0, 1)}, n) == 0.0


def test_nmi_hand_computed_contingency():
    # n = 20 gives 190 pairs; build sets realizing the contingency table
    # [[100, 20], [30, 40]] (rows: learned edge/non-edge, cols: truth).
    pairs = list(itertools.combinations(range(20), 2))
    learned = set(pairs[:120])
    truth = set(pairs[:100]) | set(pairs[120:150])
    got = nmi_edge_partition(learned, truth, 20)

    # Independent spreadsheet-style evaluation of the same table.
    t = 190
    mi = 0.0
    for nab, na, nb in ((100, 120, 130), (20, 120, 60),
                        (30, 70, 130), (40, 70, 60)):
        mi += (nab / t) * math.log(nab * t / (na * nb))
    ha = -(120 / t) * math.log(120 / t) - (70 / t) * math.log(70 / t)
    hb = -(130 / t) * math.log(130 / t) - (60 / t) * math.log(60 / t)
    assert got == pytest.approx(mi / math.sqrt(ha * hb), rel=1e-12)


def test_nmi_monte_carlo_independence():
    rng = np.random.default_rng(0)
    pairs = list(itertools.combinations(range(20), 2))
    vals = []
    for _ in range(1000):
        mask_a = rng.uniform(size=len(pairs)) < 0.5
        mask_b = rng.uniform(size=len(pairs)) < 0.5
        a = {p for p, m in zip(pairs, mask_a) if m}
        b = {p for p, m in zip(pairs, mask_b) if m}
        vals.append(nmi_edge_partition(a, b, 20))
    assert np.mean(vals) < 0.05


def test_nmi_symmetry():
    rng = np.random.default_rng(1)
    pairs = list(itertools.combinations(range(8), 2))
    a = {p for p in pairs if rng.uniform() < 0.4}
    b = {p for p in pairs if rng.uniform() < 0.4}
    assert nmi_edge_partition(a, b, 8) == pytest.approx(
        nmi_edge_partition(b, a, 8), rel=1e-12)


def test_l2_weight_error_basics():
    l = rbf_laplacian(8, seed=1)
    assert l2_weight_error(l, l) == 0.0
    # Empty learned graph: the error is the truth's weight norm.
    from heatgraph.graphs import weights_from_laplacian
    want = np.linalg.norm(weights_from_laplacian(l))
    assert l2_weight_error(np.zeros((8, 8)), l) == pytest.approx(want)
    assert l2_weight_error(l, np.zeros((8, 8))) == pytest.approx(want)


def test_l2_weight_error_normalizes_scale():
    l = rbf_laplacian(8, seed=2)
    assert l2_weight_error(3.0 * l, l) == pytest.approx(0.0, abs=1e-12)


def test_metrics_invariant_to_relabeling():
    rng = np.random.default_rng(2)
    l_a = rbf_laplacian(10, seed=3)
    l_b = rbf_laplacian(10, seed=4)
    perm = rng.permutation(10)
    pa = l_a[np.ix_(perm, perm)]
    pb = l_b[np.ix_(perm, perm)]
    r1 = evaluate_recovery(l_a, l_b)
    r2 = evaluate_recovery(pa, pb)
    assert r1.f_measure == pytest.approx(r2.f_measure, rel=1e-12)
    assert r1.nmi == pytest.approx(r2.nmi, rel=1e-12)
    assert r1.l2_weight_error == pytest.approx(r2.l2_weight_error, rel=1e-10)


def test_f_measure_is_one_only_for_identical_sets():
    rng = np.random.default_rng(3)
    pairs = list(itertools.combinations(range(9), 2))
    for _ in range(50):
        a = {p for p in pairs if rng.uniform() < 0.3}
        b = {p for p in pairs if rng.uniform() < 0.3}
        _, _, f = precision_recall_f(a, b)
        assert f <= 1.0
        if f == 1.0:
            assert a == b


def test_report_round_trip():
    rep = EdgeRecoveryReport(precision=0.5, recall=0.25, f_measure=1 / 3,
                             nmi=0.1, l2_weight_error=0.7)
    d = rep.as_dict()
    assert set(d) == {"precision", "recall", "f_measure", "nmi",
                      "l2_weight_error"}
