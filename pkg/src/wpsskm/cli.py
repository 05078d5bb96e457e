"""Command-line pipeline: ``kernel | embed | evaluate | compare``.

Settings come from built-in defaults, then an optional flat ``key=value``
file (``--config``), then command-line flags, each overriding the last.
Exit status is 0 on success, 1 for input/output or validation failures and
2 for bad configuration.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import baselines, evaluation, kernel, seqio, spectral
from .errors import PsskmError
from .rng import Xoshiro256

log = logging.getLogger("wpsskm")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    input_fasta: str | None = None
    labels_tsv: str | None = None
    output_dir: str = "."
    kmer_k: int = 3
    spaced_g: int = 9
    kpca_components: int = 50
    clip_negative: bool = True
    knn_k: int = 5
    train_frac: float = 0.7
    runs: int = 5
    base_seed: int = 42
    threads: int | None = None
    on_invalid_residue: str = "error"
    classifiers: str = "knn,nearest_centroid,logreg"
    max_pairs: int = 200

    def validate(self) -> None:
        if not self.input_fasta:
            raise ConfigError("an input FASTA is required (--input)")
        checks = [
            (1 <= self.kmer_k <= baselines.MAX_K, f"kmer_k must be in 1..{baselines.MAX_K}"),
            (self.spaced_g > self.kmer_k, "spaced_g must exceed kmer_k"),
            (self.kpca_components >= 1, "kpca_components must be >= 1"),
            (self.knn_k >= 1, "knn_k must be >= 1"),
            (0.0 < self.train_frac < 1.0, "train_frac must be in (0, 1)"),
            (self.runs >= 1, "runs must be >= 1"),
            (self.threads is None or self.threads >= 1, "threads must be >= 1"),
            (self.on_invalid_residue in ("error", "drop"), "on_invalid_residue must be 'error' or 'drop'"),
            (self.max_pairs >= 1, "max_pairs must be >= 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        for name in self.classifier_names:
            if name not in evaluation.CLASSIFIERS:
                raise ConfigError(f"unknown classifier {name!r}")

    @property
    def classifier_names(self) -> list[str]:
        return [c.strip() for c in self.classifiers.split(",") if c.strip()]

    def classifier_specs(self) -> list[evaluation.ClassifierSpec]:
        specs = []
        for name in self.classifier_names:
            params = {"k": self.knn_k} if name == "knn" else {}
            specs.append(evaluation.ClassifierSpec(name, params))
        return specs


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    try:
        if "bool" in kind:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if "int" in kind:
            return None if raw.lower() in ("", "none") and "None" in kind else int(raw)
        if "float" in kind:
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return raw


def read_config_file(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, raw = (p.strip() for p in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw)
    return values


def _add_common(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="flat key=value settings file")
    p.add_argument("--input", dest="input_fasta", default=S, help="protein FASTA file")
    p.add_argument("--labels", dest="labels_tsv", default=S, help="id<TAB>label table")
    p.add_argument("--output-dir", dest="output_dir", default=S)
    p.add_argument("--threads", type=int, default=S, help="kernel workers (default: PSSKM_THREADS or all cores)")
    p.add_argument("--on-invalid-residue", dest="on_invalid_residue", choices=["error", "drop"], default=S)
    p.add_argument("--components", dest="kpca_components", type=int, default=S)
    p.add_argument("--clip-negative", dest="clip_negative", action="store_true", default=S)
    p.add_argument("--no-clip-negative", dest="clip_negative", action="store_false", default=S)
    p.add_argument("--kmer-k", dest="kmer_k", type=int, default=S)
    p.add_argument("--spaced-g", dest="spaced_g", type=int, default=S)
    p.add_argument("--knn-k", dest="knn_k", type=int, default=S)
    p.add_argument("--train-frac", dest="train_frac", type=float, default=S)
    p.add_argument("--runs", type=int, default=S)
    p.add_argument("--base-seed", dest="base_seed", type=int, default=S)
    p.add_argument("--classifiers", default=S, help="comma list of knn,nearest_centroid,logreg")
    p.add_argument("--max-pairs", dest="max_pairs", type=int, default=S,
                   help="pairs sampled per relation by 'compare'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wpsskm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("kernel", "compute kernel.csv and a spectral report"),
        ("embed", "kernel PCA embeddings"),
        ("evaluate", "repeated stratified classification"),
        ("compare", "spectrum vs kernel distances and class heatmaps"),
    ]:
        _add_common(sub.add_parser(name, help=help_))
    return parser


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(ns, "config", None):
        values.update(read_config_file(ns.config))
    values.update({k: v for k, v in vars(ns).items() if k in _FIELD_TYPES})
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def load_dataset(cfg: RunConfig, need_labels: bool) -> seqio.LabeledDataset:
    seqs = seqio.read_fasta(cfg.input_fasta)
    if cfg.on_invalid_residue == "drop":
        seqs, _ = seqio.drop_invalid(seqs)
        if not seqs:
            raise seqio.EmptyInput("every sequence was dropped for invalid residues")
    if cfg.labels_tsv:
        ds = seqio.attach_labels(seqs, seqio.read_label_table(cfg.labels_tsv))
    elif need_labels:
        raise ConfigError("this command needs a label table (--labels)")
    else:
        ds = seqio.unlabeled(seqs)
    return seqio.pad_to_common_length(ds)


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _embed(K: kernel.KernelMatrix, cfg: RunConfig) -> spectral.EmbeddingMatrix:
    d = cfg.kpca_components
    if d > K.n:
        log.warning("requested %d components for %d sequences; capping at %d", d, K.n, K.n)
        d = K.n
    return spectral.kpca_embed(K, d, clip_negative=cfg.clip_negative)


def cmd_kernel(cfg: RunConfig) -> int:
    ds = load_dataset(cfg, need_labels=False)
    out = _outdir(cfg)
    K = kernel.kernel_matrix(ds, threads=cfg.threads)
    kernel.write_kernel_csv(K, out / "kernel.csv")
    report = spectral.eigen_spectrum(K)
    spectral.write_report(report, out / "spectrum_report.txt", out / "spectrum_report.csv")
    log.info("kernel %dx%d written; min eigenvalue %.3e, psd=%s",
             K.n, K.n, report.min_eigenvalue, report.psd_within_tol)
    return 0


def cmd_embed(cfg: RunConfig) -> int:
    ds = load_dataset(cfg, need_labels=False)
    out = _outdir(cfg)
    E = _embed(kernel.kernel_matrix(ds, threads=cfg.threads), cfg)
    spectral.write_embeddings_csv(E, out / "embeddings.csv")
    spectral.write_eigenvalues_csv(E, out / "eigenvalues.csv")
    log.info("embedded %d sequences into %d components (%d eigenvalues clipped)", E.n, E.d, E.n_clipped)
    return 0


def cmd_evaluate(cfg: RunConfig) -> int:
    ds = load_dataset(cfg, need_labels=True)
    out = _outdir(cfg)
    # fail on unsplittable classes before the kernel is built
    evaluation.stratified_split(ds.labels, cfg.train_frac, cfg.base_seed)
    E = _embed(kernel.kernel_matrix(ds, threads=cfg.threads), cfg)
    reports = evaluation.evaluate_embedding(
        E.coords, ds.y, cfg.classifier_specs(), cfg.runs, cfg.base_seed, cfg.train_frac
    )
    evaluation.write_report_csv(reports, out / "report.csv")
    sys.stdout.write(evaluation.report_table(reports))
    return 0


def _sample_pairs(ds: seqio.LabeledDataset, max_pairs: int, seed: int) -> list[tuple[int, int, str]]:
    y = ds.y
    groups: dict[str, list[tuple[int, int]]] = {"within": [], "across": []}
    for i in range(len(y)):
        for j in range(i + 1, len(y)):
            groups["within" if y[i] == y[j] else "across"].append((i, j))
    rng = Xoshiro256(seed)
    picked = []
    for rel, pairs in groups.items():
        if len(pairs) > max_pairs:
            rng.shuffle(pairs)
            pairs = sorted(pairs[:max_pairs])
        picked += [(i, j, rel) for i, j in pairs]
    return picked


def cmd_compare(cfg: RunConfig) -> int:
    ds = load_dataset(cfg, need_labels=True)
    out = _outdir(cfg)
    K = kernel.kernel_matrix(ds, threads=cfg.threads)
    spectra = [baselines.kmer_spectrum(s, cfg.kmer_k) for s in ds.sequences]

    rows, dist = [], {"within": [], "across": []}
    for i, j, rel in _sample_pairs(ds, cfg.max_pairs, cfg.base_seed):
        gk = baselines.gaussian_kernel(spectra[i], spectra[j])
        gd = baselines.gaussian_distance(spectra[i], spectra[j])
        kd = kernel.kernel_distance(K, i, j)
        dist[rel].append(kd)
        rows.append([ds.ids[i], ds.ids[j], ds.labels[i], ds.labels[j], rel,
                     f"{gk:.12g}", f"{gd:.12g}", f"{kd:.12g}"])
    with open(out / "distances.csv", "w") as fh:
        fh.write(f"id_i,id_j,label_i,label_j,relation,gaussian_kernel_k{cfg.kmer_k},"
                 f"gaussian_distance_k{cfg.kmer_k},wpsskm_distance\n")
        for r in rows:
            fh.write(",".join(r) + "\n")

    heat = baselines.class_similarity_heatmap(_embed(K, cfg), ds.labels, ds.classes)
    baselines.write_heatmap_csv(heat, out / "heatmap.csv")
    for name, spec in [
        ("heatmap_kmer.csv", spectra),
        ("heatmap_spaced.csv", [baselines.spaced_kmer_spectrum(s, cfg.kmer_k, cfg.spaced_g)
                                for s in ds.sequences]),
    ]:
        try:
            H = baselines.class_similarity_heatmap(baselines.spectrum_matrix(spec), ds.labels, ds.classes)
        except PsskmError as e:
            log.warning("skipping %s: %s", name, e)
            continue
        baselines.write_heatmap_csv(H, out / name)

    for rel, vals in dist.items():
        if vals:
            print(f"{rel:<7} pairs={len(vals):<5} mean W-PSSKM distance={np.mean(vals):.6g}")
    return 0


COMMANDS = {
    "kernel": cmd_kernel,
    "embed": cmd_embed,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
}


def _setup_logging() -> None:
    for h in [h for h in log.handlers if getattr(h, "_wpsskm_cli", False)]:
        log.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    handler._wpsskm_cli = True
    log.addHandler(handler)
    log.setLevel(logging.INFO)


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    _setup_logging()
    try:
        cfg = resolve_config(ns)
    except ConfigError as e:
        print(f"error: ConfigError: {e}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[ns.command](cfg)
    except ConfigError as e:
        print(f"error: ConfigError: {e}", file=sys.stderr)
        return 2
    except (PsskmError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
