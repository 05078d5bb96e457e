"""Weighted positional-match kernel between equal-length protein sequences.

For two sequences with indicator matrices ``P1``, ``P2`` (positions x 20) and
composition weights ``w1``, ``w2`` the kernel is::

    k = 1^T [ (P1 * P2) w1 + (P2 * P1) w2 ]

Because each real position is one-hot, this collapses to a walk over the
positions where both residues agree::

    k = sum_{i : x1[i] == x2[i] != pad} ( w1[x1[i]] + w2[x1[i]] )

``kernel_value`` evaluates the matrix form literally and is kept as an oracle;
``kernel_value_fast`` and ``kernel_matrix`` use the walk.
"""
from __future__ import annotations

import csv
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence as Seq

import numpy as np

from .errors import PsskmError, ShapeMismatch
from .pssm import (
    N_AA,
    Pssm,
    ProfileCache,
    WeightVector,
    build_profiles,
    compute_pssm,
    encode,
    weight_vector,
)
from .seqio import LabeledDataset, Sequence, require_common_length

log = logging.getLogger(__name__)

# elements (pairs x positions) handled per work unit
CHUNK_ELEMENTS = 1 << 20


@dataclass
class KernelMatrix:
    values: np.ndarray
    ids: list[str]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise ShapeMismatch(f"kernel matrix must be square, got {self.values.shape}")
        if len(self.ids) != self.values.shape[0]:
            raise ShapeMismatch("ids do not match matrix size")

    @property
    def n(self) -> int:
        return self.values.shape[0]


def kernel_value(p1: Pssm, w1: WeightVector, p2: Pssm, w2: WeightVector) -> float:
    if p1.counts.shape != p2.counts.shape:
        raise ShapeMismatch(f"PSSM shapes differ: {p1.counts.shape} vs {p2.counts.shape}")
    a = (p1.counts * p2.counts) @ w1.w
    b = (p2.counts * p1.counts) @ w2.w
    ones = np.ones(p1.seq_len)
    return float(ones @ (a + b))


def _padded_weights(w: WeightVector) -> np.ndarray:
    out = np.zeros(N_AA + 1)
    out[:N_AA] = w.w
    return out


def kernel_value_fast(seq1: Sequence, w1: WeightVector, seq2: Sequence, w2: WeightVector) -> float:
    c1, c2 = encode(seq1), encode(seq2)
    if c1.shape != c2.shape:
        raise ShapeMismatch(f"sequence lengths differ: {len(c1)} vs {len(c2)}")
    wsum = _padded_weights(w1)[c1] + _padded_weights(w2)[c1]
    return float(np.where(c1 == c2, wsum, 0.0).sum())


def pair_value(seq1: Sequence, seq2: Sequence) -> float:
    """Kernel value of two sequences, deriving both weight vectors."""
    return kernel_value_fast(
        seq1, weight_vector(compute_pssm(seq1)), seq2, weight_vector(compute_pssm(seq2))
    )


def default_threads() -> int:
    env = os.environ.get("PSSKM_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise PsskmError(f"PSSKM_THREADS must be an integer, got {env!r}") from None
        if n >= 1:
            return n
    return os.cpu_count() or 1


def _row_offsets(n: int) -> np.ndarray:
    # flat upper-triangle index at which row i starts; offsets[n] == n(n+1)/2
    i = np.arange(n + 1, dtype=np.int64)
    return i * n - i * (i - 1) // 2


def _pairs(offsets: np.ndarray, n: int, start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
    flat = np.arange(start, stop, dtype=np.int64)
    rows = np.searchsorted(offsets, flat, side="right") - 1
    cols = rows + (flat - offsets[rows])
    return rows, cols


def _chunk_values(prof: ProfileCache, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    ci = prof.codes[rows]
    cj = prof.codes[cols]
    ci_idx = ci.astype(np.intp)
    wsum = np.take_along_axis(prof.weights[rows], ci_idx, axis=1)
    wsum += np.take_along_axis(prof.weights[cols], ci_idx, axis=1)
    return np.where(ci == cj, wsum, 0.0).sum(axis=1)


def upper_triangle_chunks(n: int, seq_len: int, chunk_elements: int = CHUNK_ELEMENTS) -> list[tuple[int, int]]:
    """Contiguous ``[start, stop)`` ranges over the flattened upper triangle.

    The partition depends only on ``n`` and ``seq_len``, never on the worker
    count, which keeps the output bit-identical across thread settings.
    """
    total = n * (n + 1) // 2
    step = max(1, chunk_elements // max(1, seq_len))
    return [(a, min(a + step, total)) for a in range(0, total, step)]


def kernel_matrix_from_profiles(prof: ProfileCache, threads: int | None = None,
                                chunk_elements: int = CHUNK_ELEMENTS) -> np.ndarray:
    n = prof.n
    threads = threads or default_threads()
    offsets = _row_offsets(n)
    values = np.zeros((n, n), dtype=np.float64)

    def work(bounds: tuple[int, int]) -> None:
        rows, cols = _pairs(offsets, n, *bounds)
        # each chunk owns a disjoint set of (row, col) cells
        values[rows, cols] = _chunk_values(prof, rows, cols)

    chunks = upper_triangle_chunks(n, prof.seq_len, chunk_elements)
    if threads == 1 or len(chunks) == 1:
        for c in chunks:
            work(c)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, chunks))

    for i in range(n - 1):
        values[i + 1:, i] = values[i, i + 1:]
    return values


def kernel_matrix(ds: LabeledDataset, threads: int | None = None) -> KernelMatrix:
    """Full symmetric kernel matrix; only the upper triangle is evaluated."""
    require_common_length(ds)
    prof = build_profiles(ds.sequences)
    return KernelMatrix(kernel_matrix_from_profiles(prof, threads), ds.ids)


def kernel_matrix_literal(seqs: Seq[Sequence]) -> np.ndarray:
    """Pair-by-pair evaluation via the matrix form, recomputing profiles per pair.

    Quadratic in Python; meant as a test oracle for small inputs.
    """
    n = len(seqs)
    K = np.zeros((n, n))
    for a in range(n):
        for b in range(a, n):
            p1, p2 = compute_pssm(seqs[a]), compute_pssm(seqs[b])
            K[a, b] = kernel_value(p1, weight_vector(p1), p2, weight_vector(p2))
            K[b, a] = K[a, b]
    return K


def kernel_distance(K: KernelMatrix | np.ndarray, i: int, j: int) -> float:
    """Feature-space distance ``sqrt(k_ii + k_jj - 2 k_ij)``, clamped at zero."""
    V = K.values if isinstance(K, KernelMatrix) else np.asarray(K)
    n = V.shape[0]
    for idx in (i, j):
        if not 0 <= idx < n:
            raise IndexError(f"index {idx} out of range for {n}x{n} kernel")
    return float(np.sqrt(max(0.0, V[i, i] + V[j, j] - 2.0 * V[i, j])))


def format_value(v: float) -> str:
    return f"{v:.16e}"


def write_kernel_csv(K: KernelMatrix, path: str | Path) -> None:
    """Write ``#ids,<id0>,...`` followed by ``n`` rows of ``n`` values."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["#ids", *K.ids])
        for row in K.values:
            w.writerow([format_value(v) for v in row])


def read_kernel_csv(path: str | Path) -> KernelMatrix:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or rows[0][0] != "#ids":
        raise PsskmError(f"{path}: missing '#ids' header")
    ids = rows[0][1:]
    values = np.array([[float(v) for v in r] for r in rows[1:]], dtype=np.float64)
    if values.shape != (len(ids), len(ids)):
        raise ShapeMismatch(f"{path}: expected {len(ids)}x{len(ids)} values, got {values.shape}")
    return KernelMatrix(values, ids)
