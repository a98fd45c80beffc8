import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sggmm.errors import DimensionMismatch
from sggmm.evalmetrics import (align_clusters, confusion, edge_set, f1_score,
                               frobenius_error, pi_ad, precision_recall_f1, recovery_report)
from sggmm.mixture import MixtureParams
from sggmm.simulate import chain_precision, paper_params


def test_edge_sets():
    assert edge_set(np.eye(5)) == set()
    assert edge_set(chain_precision(5, 1)) == {(0, 1), (1, 2), (2, 3), (3, 4)}
    assert edge_set(chain_precision(5, 2)) == {(0, 2), (1, 3), (2, 4)}


def test_confusion_identity():
    truth = edge_set(chain_precision(6, 1))
    tp, fp, fn, tn = confusion(truth, truth, 6)
    assert (fp, fn) == (0, 0) and tp == 5 and tn == 15 - 5


def test_precision_half():
    prec, rec, f1 = precision_recall_f1(5, 5, 3)
    assert prec == 0.5
    assert rec == 5 / 8
    assert f1 == pytest.approx(2 * 0.5 * 0.625 / 1.125)


def test_f1_table_value():
    assert f1_score(0.4444, 1.0) == pytest.approx(0.6153, abs=5e-4)


def test_rate_conventions():
    assert precision_recall_f1(0, 0, 0) == (1.0, 1.0, 1.0)
    assert precision_recall_f1(0, 0, 4) == (0.0, 0.0, 0.0)
    assert precision_recall_f1(0, 3, 0) == (0.0, 0.0, 0.0)


def test_f1_asymmetry_uses_est_as_prediction():
    truth = {(0, 1), (1, 2), (2, 3)}
    est = {(0, 1), (0, 3)}
    p, r, _ = precision_recall_f1(*confusion(est, truth, 4)[:3])
    p2, r2, _ = precision_recall_f1(*confusion(truth, est, 4)[:3])
    assert (p, r) == (0.5, 1 / 3)
    assert (p2, r2) == (r, p)


def test_frobenius():
    t = chain_precision(4, 1)
    assert frobenius_error(t, t) == 0.0
    t2 = np.array([[2.0, 1.0], [1.0, 3.0]])
    assert frobenius_error(t2 + np.eye(2), t2) == pytest.approx(math.sqrt(2))
    assert frobenius_error(np.eye(2), [[2.0, 1.0], [1.0, 2.0]]) == pytest.approx(2.0)
    with pytest.raises(DimensionMismatch):
        frobenius_error(np.eye(2), np.eye(3))


def test_pi_ad():
    assert pi_ad([0.5, 0.5], [0.5, 0.5]) == 0.0
    assert pi_ad([0.55, 0.45], [0.5, 0.5]) == pytest.approx(0.05)
    assert pi_ad([0.3, 0.7], [0.6, 0.4]) == pytest.approx(pi_ad([0.7, 0.3], [0.4, 0.6]))
    assert pi_ad([0.2, 0.3, 0.5], [0.3, 0.3, 0.4], reduce="mean") == pytest.approx(0.2 / 3)
    with pytest.raises(DimensionMismatch):
        pi_ad([1.0], [0.5, 0.5])


def test_align_identity_and_swap():
    truth = paper_params(6)
    assert align_clusters(truth, truth) == [0, 1]
    swapped = truth.permuted([1, 0])
    assert align_clusters(swapped, truth) == [1, 0]


def test_align_noisy_swap(rng):
    truth = paper_params(8)
    noise = [0.01 * rng.standard_normal((8, 8)) for _ in range(2)]
    noisy = MixtureParams([0.45, 0.55], [truth.thetas[1] + noise[0] + noise[0].T,
                                         truth.thetas[0] + noise[1] + noise[1].T])
    assert align_clusters(noisy, truth) == [1, 0]


def test_align_ties_lexicographic():
    same = MixtureParams([0.5, 0.5], [np.eye(3), np.eye(3)])
    assert align_clusters(same, same) == [0, 1]


def test_align_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        align_clusters(paper_params(4), paper_params(5))


def test_self_report():
    truth = paper_params(10)
    rr = recovery_report(truth, truth)
    assert rr.pi_ad == 0.0 and rr.alignment == [0, 1]
    for c in rr.per_cluster:
        assert c.frobenius == 0.0 and c.f1 == 1.0 and c.fp == 0 and c.fn == 0


@st.composite
def edge_sets(draw, p):
    pairs = [(i, j) for i in range(p) for j in range(i + 1, p)]
    return set(draw(st.lists(st.sampled_from(pairs), unique=True))) if pairs else set()


@settings(max_examples=100, deadline=None)
@given(data=st.data(), p=st.integers(2, 12))
def test_confusion_partition_and_rates(data, p):
    est, truth = data.draw(edge_sets(p)), data.draw(edge_sets(p))
    tp, fp, fn, tn = confusion(est, truth, p)
    assert tp + fp + fn + tn == p * (p - 1) // 2 and min(tp, fp, fn, tn) >= 0
    for v in precision_recall_f1(tp, fp, fn):
        assert 0.0 <= v <= 1.0


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), k=st.integers(1, 4))
def test_alignment_and_ad_invariances(seed, k):
    r = np.random.default_rng(seed)
    def rand_params():
        pi = r.dirichlet(np.ones(k)) * 0.9 + 0.1 / k
        pi /= pi.sum()
        mats = []
        for _ in range(k):
            a = r.standard_normal((3, 3))
            mats.append(a @ a.T + np.eye(3))
        return MixtureParams(pi, mats)
    x, y = rand_params(), rand_params()
    assert align_clusters(x, x) == list(range(k))
    perm = list(r.permutation(k))
    assert pi_ad(x.pi[perm], y.pi[perm]) == pytest.approx(pi_ad(x.pi, y.pi), abs=1e-15)
