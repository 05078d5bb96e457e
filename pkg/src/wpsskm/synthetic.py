"""Synthetic labelled datasets with known positional structure."""
from __future__ import annotations

import numpy as np

from .seqio import AMINO_ACIDS, LabeledDataset, Sequence

_AA = np.array(list(AMINO_ACIDS))


def motif_dataset(n_classes: int = 3, per_class: int = 100, length: int = 60,
                  conserved: int = 12, noise: float = 0.1, seed: int = 0) -> LabeledDataset:
    """Classes share one random background and differ at class-specific sites.

    Each class owns ``conserved`` disjoint positions carrying residues that
    differ from the background. Every sequence then has each position
    independently redrawn uniformly with probability ``noise``.
    """
    if conserved * n_classes > length:
        raise ValueError("not enough positions for disjoint class motifs")
    rng = np.random.default_rng(seed)
    background = rng.integers(0, 20, size=length)
    sites = rng.permutation(length)[: conserved * n_classes].reshape(n_classes, conserved)
    templates = np.tile(background, (n_classes, 1))
    for c in range(n_classes):
        for p in sites[c]:
            # any residue except the background one
            templates[c, p] = (background[p] + rng.integers(1, 20)) % 20

    seqs, labels = [], []
    for c in range(n_classes):
        for r in range(per_class):
            x = templates[c].copy()
            hit = rng.random(length) < noise
            x[hit] = rng.integers(0, 20, size=int(hit.sum()))
            seqs.append(Sequence(f"c{c}_{r}", "".join(_AA[x])))
            labels.append(f"class{c}")
    return LabeledDataset(tuple(seqs), tuple(labels))


def permuted_composition_dataset(per_class: int = 30, length: int = 40, swaps: int = 2,
                                 seed: int = 0) -> LabeledDataset:
    """Two classes whose sequences all share one residue composition.

    Class B's template is a fixed shuffle of class A's; members are their
    template with ``swaps`` random transpositions, so only positions differ.
    """
    rng = np.random.default_rng(seed)
    base = rng.integers(0, 20, size=length)
    templates = [base, base[rng.permutation(length)]]
    seqs, labels = [], []
    for c, tmpl in enumerate(templates):
        for r in range(per_class):
            x = tmpl.copy()
            for _ in range(swaps):
                i, j = rng.choice(length, size=2, replace=False)
                x[i], x[j] = x[j], x[i]
            seqs.append(Sequence(f"{'AB'[c]}{r}", "".join(_AA[x])))
            labels.append("AB"[c])
    return LabeledDataset(tuple(seqs), tuple(labels))
