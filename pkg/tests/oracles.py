"""Independent reference implementations used only by the tests.

Nothing here imports the code paths it checks: sequences are walked as plain
strings, eigenpairs come from a cyclic Jacobi solver, metrics from explicit
confusion counts and AUC from pairwise rank comparison.
"""
from collections import Counter
import math

import numpy as np

PAD = "-"


def char_counts(residues):
    return Counter(c for c in residues if c != PAD)


def kernel_by_walk(x, y):
    """Position-by-position sum of the two sequences' composition weights."""
    assert len(x) == len(y)
    cx, cy = char_counts(x), char_counts(y)
    mx, my = sum(cx.values()), sum(cy.values())
    total = 0.0
    for a, b in zip(x, y):
        if a == b and a != PAD:
            total += cx[a] / mx + cy[a] / my
    return total


def diagonal_identity(x):
    c = char_counts(x)
    m = sum(c.values())
    return 2.0 / m * sum(v * v for v in c.values())


def jacobi_eigh(A, tol=1e-12, max_sweeps=100):
    """Cyclic Jacobi eigensolver; returns eigenvalues descending and vectors."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    scale = max(1.0, np.abs(A).max())
    for _ in range(max_sweeps):
        off = math.sqrt(max(0.0, (A ** 2).sum() - (np.diag(A) ** 2).sum()))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(A[p, q]) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2 * A[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                R = np.eye(n)
                R[p, p] = R[q, q] = c
                R[p, q] = s
                R[q, p] = -s
                A = R.T @ A @ R
                V = V @ R
    vals = np.diag(A).copy()
    order = np.argsort(-vals)
    return vals[order], V[:, order]


def metrics_by_confusion(y_true, y_pred, scores):
    y_true, y_pred = list(y_true), list(y_pred)
    n = len(y_true)
    labels = sorted(set(y_true) | set(y_pred))
    conf = {(a, b): 0 for a in labels for b in labels}
    for t, p in zip(y_true, y_pred):
        conf[(t, p)] += 1
    prec, rec, f1, sup = {}, {}, {}, {}
    for c in labels:
        tp = conf[(c, c)]
        col = sum(conf[(a, c)] for a in labels)
        row = sum(conf[(c, b)] for b in labels)
        prec[c] = tp / col if col else 0.0
        rec[c] = tp / row if row else 0.0
        f1[c] = 2 * prec[c] * rec[c] / (prec[c] + rec[c]) if prec[c] + rec[c] else 0.0
        sup[c] = row
    aucs = []
    for c in range(len(scores[0])):
        pos = [scores[i][c] for i in range(n) if y_true[i] == c]
        neg = [scores[i][c] for i in range(n) if y_true[i] != c]
        if pos and neg:
            aucs.append(mann_whitney_auc(pos, neg))
    return {
        "accuracy": sum(t == p for t, p in zip(y_true, y_pred)) / n,
        "precision_weighted": sum(prec[c] * sup[c] for c in labels) / n,
        "recall_weighted": sum(rec[c] * sup[c] for c in labels) / n,
        "f1_weighted": sum(f1[c] * sup[c] for c in labels) / n,
        "f1_macro": sum(f1.values()) / len(labels),
        "roc_auc_ovr": sum(aucs) / len(aucs) if aucs else float("nan"),
    }


def mann_whitney_auc(pos, neg):
    wins = 0.0
    for p in pos:
        for q in neg:
            wins += 1.0 if p > q else 0.5 if p == q else 0.0
    return wins / (len(pos) * len(neg))


def random_protein(rng, length, pad=0):
    aa = "ACDEFGHIKLMNPQRSTVWY"
    return "".join(aa[i] for i in rng.integers(0, 20, size=length)) + PAD * pad
