"""Spectral checks on kernel matrices and kernel-PCA embeddings."""
from __future__ import annotations

import csv
import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .errors import EmptySpectrum, NegativeSpectrum, NonSymmetric
from .kernel import KernelMatrix

log = logging.getLogger(__name__)

PSD_TOL = 1e-8
# eigenvalues within this fraction of the largest magnitude are treated as zero
EIG_TOL = 1e-10


def _values(K) -> np.ndarray:
    return K.values if isinstance(K, KernelMatrix) else np.asarray(K, dtype=np.float64)


def _ids(K, n: int) -> list[str]:
    return list(K.ids) if isinstance(K, KernelMatrix) else [str(i) for i in range(n)]


def check_symmetry(K) -> bool:
    V = _values(K)
    return bool(np.array_equal(V, V.T))


@dataclass(frozen=True)
class SpectralReport:
    n: int
    is_symmetric: bool
    min_eigenvalue: float
    max_eigenvalue: float
    num_negative_eigenvalues: int
    rank_estimate: int
    psd_within_tol: bool
    tol: float

    def to_text(self) -> str:
        return "".join(f"{k}={_fmt(v)}\n" for k, v in asdict(self).items())

    def csv_header(self) -> list[str]:
        return [f.name for f in fields(self)]

    def csv_row(self) -> list[str]:
        return [_fmt(v) for v in asdict(self).values()]


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def symmetric_eigh(V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a symmetric matrix in descending eigenvalue order."""
    vals, vecs = np.linalg.eigh(V)
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def eigen_spectrum(K, tol: float = PSD_TOL) -> SpectralReport:
    V = _values(K)
    if not check_symmetry(V):
        raise NonSymmetric("eigen_spectrum needs a symmetric matrix")
    vals = np.linalg.eigvalsh(V)
    lo, hi = float(vals[0]), float(vals[-1])
    neg_floor = -tol * max(1.0, hi)
    return SpectralReport(
        n=V.shape[0],
        is_symmetric=True,
        min_eigenvalue=lo,
        max_eigenvalue=hi,
        num_negative_eigenvalues=int((vals < neg_floor).sum()),
        rank_estimate=int((vals > tol * hi).sum()) if hi > 0 else 0,
        psd_within_tol=lo >= neg_floor,
        tol=tol,
    )


def write_report(report: SpectralReport, txt_path: str | Path, csv_path: str | Path | None = None) -> None:
    Path(txt_path).write_text(report.to_text())
    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(report.csv_header())
            w.writerow(report.csv_row())


def center_kernel(K) -> np.ndarray:
    """Double-centre a kernel matrix (feature-space mean removal)."""
    V = _values(K)
    row_mean = V.mean(axis=0, keepdims=True)
    col_mean = V.mean(axis=1, keepdims=True)
    Kc = V - row_mean - col_mean + V.mean()
    # restore exact symmetry lost to rounding in the two mean vectors
    return (Kc + Kc.T) / 2.0


@dataclass
class EmbeddingMatrix:
    coords: np.ndarray       # (n, d)
    eigenvalues: np.ndarray  # (d,), descending
    ids: list[str]
    requested_d: int = 0
    n_clipped: int = 0

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of each eigenvector made positive (first on ties)
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def kpca_embed(K, d: int, clip_negative: bool = True) -> EmbeddingMatrix:
    """Kernel PCA coordinates ``sqrt(lambda_j) * v_j`` of the centred kernel.

    Eigenvalues at or below ``EIG_TOL * max|lambda|`` count as non-positive.
    With ``clip_negative`` they are dropped (and counted); otherwise asking for
    such a component raises :class:`NegativeSpectrum`. If fewer than ``d``
    positive eigenvalues exist the returned ``d`` is smaller.
    """
    V = _values(K)
    n = V.shape[0]
    if not check_symmetry(V):
        raise NonSymmetric("kpca_embed needs a symmetric matrix")
    if not 1 <= d <= n:
        raise ValueError(f"need 1 <= d <= n ({n}), got {d}")
    vals, vecs = symmetric_eigh(center_kernel(V))
    scale = float(np.abs(vals).max()) if n else 0.0
    floor = EIG_TOL * scale
    positive = vals > floor
    n_clipped = int((vals < -floor).sum())

    if not clip_negative and not positive[:d].all():
        bad = int(np.flatnonzero(~positive[:d])[0])
        raise NegativeSpectrum(
            f"component {bad} has eigenvalue {vals[bad]:.3e} <= 0 (clip_negative is off)"
        )
    log.info("clipped %d negative eigenvalue(s) of the centred kernel (min %.3e)",
             n_clipped, float(vals.min()))
    keep = min(d, int(positive.sum()))
    if keep == 0:
        raise EmptySpectrum("centred kernel has no positive eigenvalues; KPCA is undefined")
    if keep < d:
        log.warning("requested %d components but only %d positive eigenvalues; using %d",
                    d, keep, keep)
    lam = vals[:keep]
    vecs = _fix_signs(vecs[:, :keep])
    return EmbeddingMatrix(vecs * np.sqrt(lam), lam, _ids(K, n), requested_d=d, n_clipped=n_clipped)


def write_embeddings_csv(E: EmbeddingMatrix, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", *(f"c{j}" for j in range(E.d))])
        for sid, row in zip(E.ids, E.coords):
            w.writerow([sid, *(f"{v:.16e}" for v in row)])


def write_eigenvalues_csv(E: EmbeddingMatrix, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["component", "eigenvalue"])
        for j, lam in enumerate(E.eigenvalues):
            w.writerow([j, f"{lam:.16e}"])
