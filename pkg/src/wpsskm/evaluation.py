"""Supervised evaluation: stratified splits, embedding classifiers, metrics."""
from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import astuple, dataclass, field, fields
from pathlib import Path
from typing import Callable, Iterable, Sequence as Seq

import numpy as np

from .errors import Diverged, PsskmError, StratificationImpossible
from .kernel import kernel_matrix
from .rng import Xoshiro256
from .spectral import kpca_embed

log = logging.getLogger(__name__)


# -- splitting ---------------------------------------------------------------

@dataclass(frozen=True)
class SplitPlan:
    train_indices: list[int]
    test_indices: list[int]
    seed: int
    train_frac: float


def stratified_split(labels: Seq, train_frac: float, seed: int) -> SplitPlan:
    """Per-class shuffled split with ``round(train_frac * m)`` training members.

    Classes are visited in first-appearance order and their member indices
    shuffled in place by one :class:`Xoshiro256` stream seeded with ``seed``.
    Each class keeps at least one member on each side.
    """
    if not 0.0 < train_frac < 1.0:
        raise ValueError(f"train_frac must be in (0, 1), got {train_frac}")
    members: dict = {}
    for i, l in enumerate(labels):
        members.setdefault(l, []).append(i)
    for l, idx in members.items():
        if len(idx) < 2:
            raise StratificationImpossible(str(l), len(idx))

    rng = Xoshiro256(seed)
    train, test = [], []
    for idx in members.values():
        idx = list(idx)
        rng.shuffle(idx)
        m = len(idx)
        n_train = min(max(math.floor(train_frac * m + 0.5), 1), m - 1)
        train += idx[:n_train]
        test += idx[n_train:]
    return SplitPlan(sorted(train), sorted(test), seed, train_frac)


# -- classifiers ---------------------------------------------------------------

def _n_classes(y: np.ndarray, n_classes: int | None) -> int:
    return int(n_classes) if n_classes is not None else int(y.max()) + 1


def knn_predict(train_emb, train_labels, test_emb, k: int = 5,
                n_classes: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Euclidean k-NN majority vote.

    Scores are per-class vote fractions. Vote ties go to the class whose
    neighbours have the smaller mean distance, then to the smaller class index.
    Equidistant neighbours are ordered by training index.
    """
    X = np.asarray(train_emb, dtype=np.float64)
    y = np.asarray(train_labels, dtype=np.int64)
    T = np.asarray(test_emb, dtype=np.float64)
    if len(X) == 0:
        raise PsskmError("k-NN needs a non-empty training set")
    if not 1 <= k <= len(X):
        raise ValueError(f"need 1 <= k <= {len(X)}, got {k}")
    C = _n_classes(y, n_classes)
    preds = np.empty(len(T), dtype=np.int64)
    scores = np.zeros((len(T), C))
    for r, t in enumerate(T):
        dist = np.sqrt(((X - t) ** 2).sum(axis=1))
        nn = np.argsort(dist, kind="stable")[:k]
        votes = np.bincount(y[nn], minlength=C)
        scores[r] = votes / k
        tied = np.flatnonzero(votes == votes.max())
        if len(tied) == 1:
            preds[r] = tied[0]
        else:
            mean_d = [dist[nn][y[nn] == c].mean() for c in tied]
            preds[r] = tied[int(np.argmin(mean_d))]
    return preds, scores


def nearest_centroid_predict(train_emb, train_labels, test_emb,
                             n_classes: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Nearest class mean; scores are a softmin over centroid distances."""
    X = np.asarray(train_emb, dtype=np.float64)
    y = np.asarray(train_labels, dtype=np.int64)
    T = np.asarray(test_emb, dtype=np.float64)
    if len(X) == 0:
        raise PsskmError("nearest centroid needs a non-empty training set")
    C = _n_classes(y, n_classes)
    present = np.array([c for c in range(C) if (y == c).any()])
    centroids = np.stack([X[y == c].mean(axis=0) for c in present])
    dist = np.sqrt(((T[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2))
    preds = present[np.argmin(dist, axis=1)]
    e = np.exp(-(dist - dist.min(axis=1, keepdims=True)))
    scores = np.zeros((len(T), C))
    scores[:, present] = e / e.sum(axis=1, keepdims=True)
    return preds, scores


@dataclass
class SoftmaxRegression:
    """Multinomial logistic regression fit by full-batch gradient descent.

    Features are standardised with training statistics; weights and bias
    start at zero. The L2 penalty applies to weights only.
    """

    l2: float = 1e-3
    epochs: int = 500
    lr: float = 0.1
    coef_: np.ndarray | None = None
    intercept_: np.ndarray | None = None
    loss_: float = float("nan")

    def _standardize(self, X: np.ndarray) -> np.ndarray:
        return (X - self._mu) / self._sd

    def fit(self, X, y, n_classes: int | None = None) -> "SoftmaxRegression":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        C = _n_classes(y, n_classes)
        self._mu = X.mean(axis=0)
        sd = X.std(axis=0)
        self._sd = np.where(sd > 0, sd, 1.0)
        Z = self._standardize(X)
        m, d = Z.shape
        Y = np.zeros((m, C))
        Y[np.arange(m), y] = 1.0
        W = np.zeros((d, C))
        b = np.zeros(C)
        for _ in range(self.epochs):
            with np.errstate(over="ignore", invalid="ignore"):
                P = _softmax(Z @ W + b)
                loss = -np.log(np.clip(P[np.arange(m), y], 1e-300, None)).mean() + 0.5 * self.l2 * (W * W).sum()
            if not np.isfinite(loss):
                raise Diverged(f"logistic regression diverged (lr={self.lr})")
            G = (P - Y) / m
            W -= self.lr * (Z.T @ G + self.l2 * W)
            b -= self.lr * G.sum(axis=0)
        self.coef_, self.intercept_ = W, b
        self.loss_ = float(loss) if self.epochs else float("nan")
        return self

    def predict_proba(self, X) -> np.ndarray:
        Z = self._standardize(np.asarray(X, dtype=np.float64))
        return _softmax(Z @ self.coef_ + self.intercept_)


def _softmax(A: np.ndarray) -> np.ndarray:
    A = A - A.max(axis=1, keepdims=True)
    E = np.exp(A)
    return E / E.sum(axis=1, keepdims=True)


def logistic_regression(train_emb, train_labels, test_emb, l2: float = 1e-3, epochs: int = 500,
                        lr: float = 0.1, n_classes: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    model = SoftmaxRegression(l2=l2, epochs=epochs, lr=lr).fit(train_emb, train_labels, n_classes)
    P = model.predict_proba(test_emb)
    return np.argmax(P, axis=1), P


CLASSIFIERS: dict[str, Callable] = {
    "knn": knn_predict,
    "nearest_centroid": nearest_centroid_predict,
    "logreg": logistic_regression,
}


@dataclass(frozen=True)
class ClassifierSpec:
    name: str
    params: dict = field(default_factory=dict)

    def __call__(self, train_emb, train_labels, test_emb, n_classes: int):
        if self.name not in CLASSIFIERS:
            raise PsskmError(f"unknown classifier {self.name!r}; choose from {sorted(CLASSIFIERS)}")
        return CLASSIFIERS[self.name](train_emb, train_labels, test_emb, n_classes=n_classes, **self.params)


# -- metrics -----------------------------------------------------------------

@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision_weighted: float
    recall_weighted: float
    f1_weighted: float
    f1_macro: float
    roc_auc_ovr: float
    train_time_seconds: float = 0.0
    zero_division: bool = field(default=False, compare=False)


METRIC_NAMES = [f.name for f in fields(Metrics) if f.name != "zero_division"]
CSV_COLUMNS = ["accuracy", "prec_w", "recall_w", "f1_w", "f1_macro", "roc_auc", "train_time"]


def roc_auc_binary(is_pos: np.ndarray, score: np.ndarray) -> float:
    """Area under the ROC curve by trapezoids over distinct score thresholds."""
    order = np.argsort(-score, kind="stable")
    s, pos = score[order], is_pos[order]
    # last index of each run of equal scores
    cut = np.flatnonzero(np.diff(s) != 0)
    ends = np.r_[cut, len(s) - 1]
    tp = np.cumsum(pos)[ends]
    fp = (ends + 1) - tp
    tpr = np.r_[0.0, tp / pos.sum()]
    fpr = np.r_[0.0, fp / (len(pos) - pos.sum())]
    return float(np.sum((fpr[1:] - fpr[:-1]) * (tpr[1:] + tpr[:-1]) / 2.0))


def compute_metrics(y_true, y_pred, score_rows) -> Metrics:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    S = np.asarray(score_rows, dtype=np.float64)
    if not (len(y_true) == len(y_pred) == len(S)):
        raise PsskmError(f"length mismatch: {len(y_true)} true, {len(y_pred)} predicted, {len(S)} score rows")
    if len(y_true) == 0:
        raise PsskmError("no samples to score")
    C = S.shape[1]
    if y_true.min() < 0 or y_true.max() >= C:
        raise PsskmError("true label outside the score columns")
    if y_pred.min() < 0 or y_pred.max() >= C:
        raise PsskmError(f"predicted label outside 0..{C - 1}")
    if not np.allclose(S.sum(axis=1), 1.0, rtol=0, atol=1e-6):
        raise PsskmError("score rows must sum to 1")

    n = len(y_true)
    labels = np.union1d(y_true, y_pred)
    support = np.array([(y_true == c).sum() for c in labels], dtype=np.float64)
    tp = np.array([((y_true == c) & (y_pred == c)).sum() for c in labels], dtype=np.float64)
    pred_count = np.array([(y_pred == c).sum() for c in labels], dtype=np.float64)
    zero_div = bool((pred_count == 0).any() or (support == 0).any())
    with np.errstate(divide="ignore", invalid="ignore"):
        prec = np.where(pred_count > 0, tp / pred_count, 0.0)
        rec = np.where(support > 0, tp / support, 0.0)
        f1 = np.where(prec + rec > 0, 2 * prec * rec / (prec + rec), 0.0)
    weights = support / n

    aucs = []
    for c in range(C):
        is_pos = (y_true == c).astype(np.int64)
        if is_pos.sum() == 0:
            log.warning("class %d absent from y_true; excluded from ROC-AUC", c)
            continue
        if is_pos.sum() == n:
            continue
        aucs.append(roc_auc_binary(is_pos, S[:, c]))

    return Metrics(
        accuracy=float((y_true == y_pred).mean()),
        precision_weighted=float((prec * weights).sum()),
        recall_weighted=float((rec * weights).sum()),
        f1_weighted=float((f1 * weights).sum()),
        f1_macro=float(f1.mean()),
        roc_auc_ovr=float(np.mean(aucs)) if aucs else float("nan"),
        zero_division=zero_div,
    )


# -- repeated protocol ---------------------------------------------------------

@dataclass
class EvalReport:
    classifier: str
    per_run: list[Metrics]
    seeds: list[int]

    def _column(self, name: str) -> np.ndarray:
        return np.array([getattr(m, name) for m in self.per_run])

    @property
    def mean(self) -> dict[str, float]:
        return {k: float(self._column(k).mean()) for k in METRIC_NAMES}

    @property
    def std(self) -> dict[str, float]:
        return {k: float(self._column(k).std(ddof=0)) for k in METRIC_NAMES}


def evaluate_embedding(X: np.ndarray, y: Seq[int], classifiers: Iterable[ClassifierSpec],
                       runs: int = 5, base_seed: int = 42, train_frac: float = 0.7,
                       seeds: Seq[int] | None = None) -> list[EvalReport]:
    """Run every classifier on ``runs`` stratified splits of fixed embeddings.

    Run ``r`` uses seed ``base_seed + r`` unless ``seeds`` is given. Time is
    wall clock around the classifier's fit-and-predict call.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    seeds = list(seeds) if seeds is not None else [base_seed + r for r in range(runs)]
    if len(seeds) != runs:
        raise ValueError(f"{len(seeds)} seeds for {runs} runs")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    C = int(y.max()) + 1
    classifiers = list(classifiers)
    reports = [EvalReport(c.name, [], list(seeds)) for c in classifiers]
    for seed in seeds:
        plan = stratified_split(y.tolist(), train_frac, seed)
        tr, te = np.array(plan.train_indices), np.array(plan.test_indices)
        for spec, rep in zip(classifiers, reports):
            t0 = time.perf_counter()
            pred, scores = spec(X[tr], y[tr], X[te], C)
            elapsed = time.perf_counter() - t0
            m = compute_metrics(y[te], pred, scores)
            rep.per_run.append(Metrics(*astuple(m)[:6], train_time_seconds=elapsed,
                                       zero_division=m.zero_division))
    return reports


def repeated_eval(ds, classifiers, runs: int = 5, base_seed: int = 42, train_frac: float = 0.7,
                  components: int = 50, clip_negative: bool = True, threads: int | None = None,
                  seeds: Seq[int] | None = None) -> list[EvalReport]:
    """Kernel matrix, kernel PCA on the full dataset, then repeated splits.

    The embedding is fitted once on all sequences (transductive) and split by
    rows for each run.
    """
    if isinstance(classifiers, ClassifierSpec):
        classifiers = [classifiers]
    K = kernel_matrix(ds, threads=threads)
    E = kpca_embed(K, min(components, K.n), clip_negative=clip_negative)
    return evaluate_embedding(E.coords, ds.y, classifiers, runs, base_seed, train_frac, seeds)


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _row(m: dict | Metrics) -> list[str]:
    get = m.get if isinstance(m, dict) else lambda k: getattr(m, k)
    return [_fmt(get(k)) for k in METRIC_NAMES]


def report_csv(reports: Seq[EvalReport]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["run", "classifier", *CSV_COLUMNS])
    if reports:
        for r in range(len(reports[0].per_run)):
            for rep in reports:
                w.writerow([r, rep.classifier, *_row(rep.per_run[r])])
    for rep in reports:
        w.writerow(["mean", rep.classifier, *_row(rep.mean)])
        w.writerow(["std", rep.classifier, *_row(rep.std)])
    return out.getvalue()


def write_report_csv(reports: Seq[EvalReport], path: str | Path) -> None:
    Path(path).write_text(report_csv(reports))


def report_table(reports: Seq[EvalReport]) -> str:
    head = f"{'classifier':<18}" + "".join(f"{c:>20}" for c in CSV_COLUMNS)
    lines = [head, "-" * len(head)]
    for rep in reports:
        mu, sd = rep.mean, rep.std
        cells = "".join(f"{mu[k]:>11.4f} ± {sd[k]:<6.4f}" for k in METRIC_NAMES)
        lines.append(f"{rep.classifier:<18}{cells}")
    return "\n".join(lines) + "\n"
