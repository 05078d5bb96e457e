"""Per-sequence positional indicator matrices and composition weights."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence as Seq

import numpy as np

from .errors import AllPadding, NotAnAminoAcid, ShapeMismatch
from .seqio import AMINO_ACIDS, PAD, Sequence, check_residues

N_AA = len(AMINO_ACIDS)
# integer code used for pad positions in encoded arrays
PAD_CODE = N_AA

_LOOKUP = np.full(256, -1, dtype=np.int16)
for _i, _c in enumerate(AMINO_ACIDS):
    _LOOKUP[ord(_c)] = _i
_LOOKUP[ord(PAD)] = PAD_CODE


def aa_index(c: str) -> int:
    i = AMINO_ACIDS.find(c) if len(c) == 1 else -1
    if i < 0:
        raise NotAnAminoAcid(f"{c!r} is not one of {AMINO_ACIDS}")
    return i


@dataclass(frozen=True)
class Pssm:
    counts: np.ndarray  # (seq_len, 20) int
    seq_len: int

    @property
    def column_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)


@dataclass(frozen=True)
class WeightVector:
    w: np.ndarray  # (20,) float64


def compute_pssm(seq: Sequence) -> Pssm:
    check_residues(seq)
    s = len(seq.residues)
    counts = np.zeros((s, N_AA), dtype=np.int64)
    for i, c in enumerate(seq.residues):
        if c == PAD:
            continue
        counts[i, aa_index(c)] += 1
    return Pssm(counts, s)


def weight_vector(p: Pssm) -> WeightVector:
    freq = p.column_sums
    total = freq.sum()
    if total == 0:
        raise AllPadding("sequence has no non-pad residues")
    return WeightVector(freq.astype(np.float64) / float(total))


def encode(seq: Sequence | str) -> np.ndarray:
    """Integer codes 0..19 per residue, ``PAD_CODE`` for pad positions."""
    residues = seq.residues if isinstance(seq, Sequence) else seq
    codes = _LOOKUP[np.frombuffer(residues.encode("ascii"), dtype=np.uint8)]
    if (codes < 0).any():
        pos = int(np.flatnonzero(codes < 0)[0])
        raise NotAnAminoAcid(f"{residues[pos]!r} at position {pos}")
    return codes.astype(np.int8)


@dataclass(frozen=True)
class ProfileCache:
    """Encoded residues and weight vectors for a whole dataset, built once.

    ``weights`` carries a 21st all-zero column so that indexing it with
    ``PAD_CODE`` yields a zero contribution.
    """

    codes: np.ndarray    # (n, s) int8
    weights: np.ndarray  # (n, 21) float64

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    @property
    def seq_len(self) -> int:
        return self.codes.shape[1]


def build_profiles(seqs: Seq[Sequence]) -> ProfileCache:
    n = len(seqs)
    s = len(seqs[0].residues)
    if any(len(seq.residues) != s for seq in seqs):
        raise ShapeMismatch("sequences differ in length; pad the dataset first")
    codes = np.empty((n, s), dtype=np.int8)
    weights = np.zeros((n, N_AA + 1), dtype=np.float64)
    for i, seq in enumerate(seqs):
        check_residues(seq)
        codes[i] = encode(seq)
        # column sums of the indicator matrix, read straight off the codes
        freq = np.bincount(codes[i], minlength=N_AA + 1)[:N_AA]
        total = freq.sum()
        if total == 0:
            raise AllPadding(f"sequence {seq.id!r} has no non-pad residues")
        weights[i, :N_AA] = freq / float(total)
    return ProfileCache(codes, weights)


def write_pssm_csv(p: Pssm, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(AMINO_ACIDS))
        w.writerows(p.counts.tolist())
