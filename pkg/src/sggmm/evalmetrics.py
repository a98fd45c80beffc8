"""Edge recovery and parameter error metrics, with label-switching alignment."""
from dataclasses import dataclass, asdict
import itertools

import numpy as np

from .errors import DimensionMismatch

EDGE_TOL = 1e-6


@dataclass
class ClusterRecovery:
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    frobenius: float


@dataclass
class RecoveryReport:
    per_cluster: list
    pi_ad: float
    alignment: list

    def to_dict(self):
        return {"per_cluster": [asdict(c) for c in self.per_cluster],
                "pi_ad": self.pi_ad, "alignment": list(self.alignment)}


def edge_set(theta, tol=EDGE_TOL):
    """Unordered pairs ``(i, j)``, ``i < j``, 0-based, with ``|theta_ij| > tol``."""
    theta = np.asarray(theta)
    i, j = np.triu_indices(theta.shape[0], 1)
    keep = np.abs(theta[i, j]) > tol
    return {(int(a), int(b)) for a, b in zip(i[keep], j[keep])}


def confusion(est, truth, p):
    est, truth = set(est), set(truth)
    tp = len(est & truth)
    fp = len(est - truth)
    fn = len(truth - est)
    return tp, fp, fn, p * (p - 1) // 2 - tp - fp - fn


def precision_recall_f1(tp, fp, fn):
    """Rates with the convention that an empty prediction against an empty
    truth scores 1 everywhere, and any other zero denominator scores 0."""
    if tp + fp + fn == 0:
        return 1.0, 1.0, 1.0
    prec = tp / (tp + fp) if tp + fp else 0.0
    rec = tp / (tp + fn) if tp + fn else 0.0
    return prec, rec, f1_score(prec, rec)


def f1_score(precision, recall):
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def frobenius_error(est, truth):
    est, truth = np.asarray(est, dtype=float), np.asarray(truth, dtype=float)
    if est.shape != truth.shape:
        raise DimensionMismatch(f"shapes differ: {est.shape} vs {truth.shape}")
    return float(np.sqrt(np.sum((est - truth) ** 2)))


def pi_ad(est_pi, true_pi, reduce="max"):
    est_pi, true_pi = np.asarray(est_pi, dtype=float), np.asarray(true_pi, dtype=float)
    if est_pi.shape != true_pi.shape:
        raise DimensionMismatch(f"K differs: {est_pi.shape[0]} vs {true_pi.shape[0]}")
    dev = np.abs(est_pi - true_pi)
    return float(dev.max() if reduce == "max" else dev.mean())


def align_clusters(est, truth):
    """Permutation ``perm`` minimizing sum_k ||est[perm[k]] - truth[k]||_F.

    Exhaustive over K!; the first minimum in lexicographic order wins.
    """
    if est.k != truth.k or est.p != truth.p:
        raise DimensionMismatch(f"est has K={est.k}, p={est.p}; truth has K={truth.k}, p={truth.p}")
    best, best_cost = None, np.inf
    for perm in itertools.permutations(range(truth.k)):
        cost = sum(frobenius_error(est.thetas[perm[k]], truth.thetas[k]) for k in range(truth.k))
        if cost < best_cost:
            best, best_cost = list(perm), cost
    return best


def recovery_report(est, truth, tol=EDGE_TOL, ad_reduce="max"):
    """Align ``est`` to ``truth`` and score every component against its match."""
    perm = align_clusters(est, truth)
    p = truth.p
    clusters = []
    for k in range(truth.k):
        e = est.thetas[perm[k]]
        tp, fp, fn, tn = confusion(edge_set(e, tol), edge_set(truth.thetas[k], tol), p)
        prec, rec, f1 = precision_recall_f1(tp, fp, fn)
        clusters.append(ClusterRecovery(tp, fp, fn, tn, prec, rec, f1,
                                        frobenius_error(e, truth.thetas[k])))
    return RecoveryReport(clusters, pi_ad(est.pi[perm], truth.pi, ad_reduce), perm)
