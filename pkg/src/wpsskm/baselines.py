"""k-mer spectrum baselines and the distance / heatmap comparisons built on them."""
from __future__ import annotations

import csv
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence as Seq

import numpy as np

from .errors import DimMismatch, InvalidSpacedParams, PsskmError
from .pssm import N_AA, aa_index
from .seqio import AMINO_ACIDS, Sequence

log = logging.getLogger(__name__)

MAX_K = 6


@dataclass(frozen=True)
class SpectrumVector:
    k: int
    counts: dict[int, int] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return N_AA ** self.k

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        for idx, c in self.counts.items():
            out[idx] = c
        return out


def kmer_to_index(kmer: str) -> int:
    idx = 0
    for c in kmer:
        idx = idx * N_AA + aa_index(c)
    return idx


def index_to_kmer(idx: int, k: int) -> str:
    chars = []
    for _ in range(k):
        idx, r = divmod(idx, N_AA)
        chars.append(AMINO_ACIDS[r])
    return "".join(reversed(chars))


def _check_k(k: int) -> None:
    if not 1 <= k <= MAX_K:
        raise PsskmError(f"k must be in 1..{MAX_K}, got {k}")


def _count(k: int, kmers) -> SpectrumVector:
    return SpectrumVector(k, dict(Counter(kmer_to_index(m) for m in kmers)))


def kmer_spectrum(seq: Sequence | str, k: int) -> SpectrumVector:
    """Counts of contiguous k-mers over the non-pad prefix."""
    _check_k(k)
    core = seq.core if isinstance(seq, Sequence) else seq.rstrip("-")
    return _count(k, (core[i:i + k] for i in range(len(core) - k + 1)))


def spaced_kmer_spectrum(seq: Sequence | str, k: int, g: int, all_substrings: bool = False) -> SpectrumVector:
    """k-mers drawn from every contiguous g-mer of the non-pad prefix.

    By default each g-mer contributes its leading k characters. With
    ``all_substrings`` every contiguous k-substring of each g-mer is counted.
    """
    _check_k(k)
    if k >= g:
        raise InvalidSpacedParams(f"need k < g, got k={k}, g={g}")
    core = seq.core if isinstance(seq, Sequence) else seq.rstrip("-")
    gmers = [core[i:i + g] for i in range(len(core) - g + 1)]
    if all_substrings:
        kmers = (gm[j:j + k] for gm in gmers for j in range(g - k + 1))
    else:
        kmers = (gm[:k] for gm in gmers)
    return _count(k, kmers)


def spectrum_matrix(spectra: Seq[SpectrumVector]) -> np.ndarray:
    """Stack spectra densely, one row per sequence."""
    if not spectra:
        return np.zeros((0, 0))
    dims = {s.dim for s in spectra}
    if len(dims) != 1:
        raise DimMismatch("spectra have different k")
    out = np.zeros((len(spectra), dims.pop()))
    for r, s in enumerate(spectra):
        for idx, c in s.counts.items():
            out[r, idx] = c
    return out


def gaussian_kernel(u: SpectrumVector, v: SpectrumVector, gamma: float | None = None) -> float:
    if u.k != v.k:
        raise DimMismatch(f"spectra of k={u.k} and k={v.k} are not comparable")
    if gamma is None:
        gamma = 1.0 / u.dim
    if gamma < 0:
        raise PsskmError("gamma must be non-negative")
    # squared distance over the union of non-zero indices equals the dense one
    keys = u.counts.keys() | v.counts.keys()
    sq = float(sum((u.counts.get(i, 0) - v.counts.get(i, 0)) ** 2 for i in keys))
    return float(np.exp(-gamma * sq))


def gaussian_distance(u: SpectrumVector, v: SpectrumVector, gamma: float | None = None) -> float:
    """Feature-space distance induced by the Gaussian kernel, ``sqrt(2 - 2k)``."""
    return float(np.sqrt(max(0.0, 2.0 - 2.0 * gaussian_kernel(u, v, gamma))))


@dataclass
class ClassSimilarityMatrix:
    classes: list[str]
    values: np.ndarray
    raw: np.ndarray
    n_excluded: int = 0


def _minmax(M: np.ndarray) -> np.ndarray:
    lo, hi = float(M.min()), float(M.max())
    if hi - lo <= 0:
        log.warning("heatmap has zero range; all entries normalised to 0")
        return np.zeros_like(M)
    return (M - lo) / (hi - lo)


def class_similarity_heatmap(E, labels: Seq, classes: Seq | None = None) -> ClassSimilarityMatrix:
    """Mean inter-class cosine similarity of embedding rows, min-max normalised.

    ``E`` is an embedding (anything with ``.coords``) or a plain ``(n, d)``
    array. Diagonal entries average over distinct members of the same class.
    """
    X = np.asarray(getattr(E, "coords", E), dtype=np.float64)
    labels = list(labels)
    if len(labels) != X.shape[0]:
        raise DimMismatch(f"{len(labels)} labels for {X.shape[0]} embedding rows")
    if classes is None:
        classes = list(dict.fromkeys(labels))
    classes = list(classes)
    norms = np.linalg.norm(X, axis=1)
    ok = norms > 0
    n_excluded = int((~ok).sum())
    if n_excluded:
        log.warning("excluded %d zero-norm embedding row(s) from the heatmap", n_excluded)
    U = np.zeros_like(X)
    U[ok] = X[ok] / norms[ok, None]
    S = U @ U.T

    lab = np.array([classes.index(l) for l in labels])
    C = len(classes)
    raw = np.zeros((C, C))
    for a in range(C):
        ia = np.flatnonzero((lab == a) & ok)
        if len(ia) == 0:
            raise PsskmError(f"class {classes[a]!r} has no usable members")
        for b in range(a, C):
            ib = np.flatnonzero((lab == b) & ok)
            block = S[np.ix_(ia, ib)]
            if a == b:
                m = len(ia)
                # single-member class: no distinct pair, fall back to self-similarity
                mean = (block.sum() - np.trace(block)) / (m * (m - 1)) if m > 1 else float(block[0, 0])
            else:
                mean = block.mean()
            raw[a, b] = raw[b, a] = mean
    return ClassSimilarityMatrix([str(c) for c in classes], _minmax(raw), raw, n_excluded)


def write_heatmap_csv(H: ClassSimilarityMatrix, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["", *H.classes])
        for c, row in zip(H.classes, H.values):
            w.writerow([c, *(f"{v:.12g}" for v in row)])


def write_spectrum_csv(spec: SpectrumVector, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "kmer", "count"])
        for idx in sorted(spec.counts):
            w.writerow([idx, index_to_kmer(idx, spec.k), spec.counts[idx]])

