"""FASTA parsing, label attachment and length normalisation."""
from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Mapping, Union

from .errors import (
    DuplicateId,
    EmptyInput,
    EmptyRecord,
    InvalidResidue,
    MalformedFasta,
    MissingLabel,
    PsskmError,
    ShapeMismatch,
)

log = logging.getLogger(__name__)

AMINO_ACIDS = "ACDEFGHIKLMNPQRSTVWY"
PAD = "-"


@dataclass(frozen=True)
class Alphabet:
    symbols: str = AMINO_ACIDS
    pad_symbol: str = PAD

    def __post_init__(self):
        if len(self.symbols) != 20 or len(set(self.symbols)) != 20:
            raise ValueError("alphabet needs exactly 20 distinct symbols")
        if len(self.pad_symbol) != 1 or self.pad_symbol in self.symbols:
            raise ValueError("pad symbol must be a single character outside the alphabet")

    def __contains__(self, c: str) -> bool:
        return c in self.symbols


PROTEIN = Alphabet()


@dataclass(frozen=True)
class Sequence:
    id: str
    residues: str

    def __post_init__(self):
        if not self.id:
            raise ValueError("sequence id must be non-empty")
        if not self.residues:
            raise ValueError(f"sequence {self.id!r} is empty")

    def __len__(self) -> int:
        return len(self.residues)

    @property
    def core(self) -> str:
        """Residues with any trailing pad suffix removed."""
        return self.residues.rstrip(PAD)


@dataclass(frozen=True)
class LabeledDataset:
    sequences: tuple[Sequence, ...]
    labels: tuple[str, ...]
    class_index: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.sequences) != len(self.labels):
            raise PsskmError(
                f"{len(self.sequences)} sequences but {len(self.labels)} labels"
            )
        if not self.sequences:
            raise EmptyInput("dataset has no sequences")
        ids = [s.id for s in self.sequences]
        if len(set(ids)) != len(ids):
            seen: set[str] = set()
            for k, i in enumerate(ids):
                if i in seen:
                    raise DuplicateId(k, i)
                seen.add(i)
        if not self.class_index:
            object.__setattr__(self, "class_index", _first_appearance_index(self.labels))

    def __len__(self) -> int:
        return len(self.sequences)

    @property
    def ids(self) -> list[str]:
        return [s.id for s in self.sequences]

    @property
    def classes(self) -> list[str]:
        return sorted(self.class_index, key=self.class_index.__getitem__)

    @property
    def y(self) -> list[int]:
        return [self.class_index[l] for l in self.labels]

    @property
    def common_length(self) -> int | None:
        lengths = {len(s) for s in self.sequences}
        return lengths.pop() if len(lengths) == 1 else None

    def label_counts(self) -> dict[str, int]:
        counts = {c: 0 for c in self.classes}
        for l in self.labels:
            counts[l] += 1
        return counts


def _first_appearance_index(labels: Iterable[str]) -> dict[str, int]:
    index: dict[str, int] = {}
    for l in labels:
        if l not in index:
            index[l] = len(index)
    return index


Source = Union[bytes, str, Path, IO]


def _read_text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def parse_fasta(source: Source) -> list[Sequence]:
    """Parse FASTA text into sequences, preserving record order.

    ``source`` may be raw bytes, text, a :class:`~pathlib.Path` or an open
    file. The id is the header up to the first whitespace; wrapped sequence
    lines are concatenated and uppercased.
    """
    text = _read_text(source)
    records: list[tuple[str, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(">"):
            header = line[1:].split(None, 1)
            records.append((header[0] if header else "", []))
        elif not records:
            raise MalformedFasta(f"line {lineno}: sequence data before the first header")
        else:
            records[-1][1].append("".join(line.split()))
    if not records:
        raise EmptyInput("no FASTA records found")

    seqs: list[Sequence] = []
    seen: set[str] = set()
    for k, (rid, parts) in enumerate(records):
        if not rid:
            raise MalformedFasta(f"record {k} has an empty header id")
        body = "".join(parts).upper()
        if not body:
            raise EmptyRecord(k, rid)
        if rid in seen:
            raise DuplicateId(k, rid)
        seen.add(rid)
        seqs.append(Sequence(rid, body))
    return seqs


def read_fasta(path: str | Path) -> list[Sequence]:
    return parse_fasta(Path(path).read_bytes())


def format_fasta(seqs: Iterable[Sequence], width: int = 60) -> str:
    out = io.StringIO()
    for s in seqs:
        out.write(f">{s.id}\n")
        for start in range(0, len(s.residues), width):
            out.write(s.residues[start:start + width] + "\n")
    return out.getvalue()


def parse_label_table(source: Source) -> dict[str, str]:
    """Read ``id<TAB>label`` rows; blank lines and ``#`` comments are skipped."""
    table: dict[str, str] = {}
    for lineno, raw in enumerate(_read_text(source).splitlines(), 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 2 or not parts[0].strip() or not parts[1].strip():
            raise PsskmError(f"label table line {lineno}: expected 'id<TAB>label'")
        table[parts[0].strip()] = parts[1].strip()
    return table


def read_label_table(path: str | Path) -> dict[str, str]:
    return parse_label_table(Path(path).read_bytes())


def attach_labels(seqs: Iterable[Sequence], label_table: Mapping[str, str]) -> LabeledDataset:
    seqs = list(seqs)
    labels = []
    for s in seqs:
        if s.id not in label_table:
            raise MissingLabel(s.id)
        labels.append(label_table[s.id])
    unused = len(set(label_table) - {s.id for s in seqs})
    if unused:
        log.warning("%d label table entries have no matching sequence", unused)
    return LabeledDataset(tuple(seqs), tuple(labels))


def unlabeled(seqs: Iterable[Sequence], label: str = "unlabeled") -> LabeledDataset:
    """Wrap sequences in a single-class dataset for label-free stages."""
    seqs = tuple(seqs)
    return LabeledDataset(seqs, (label,) * len(seqs))


def check_residues(seq: Sequence, alphabet: Alphabet = PROTEIN) -> None:
    """Raise :class:`InvalidResidue` unless ``seq`` is alphabet symbols plus an optional pad suffix."""
    body = seq.residues
    core_len = len(body.rstrip(alphabet.pad_symbol))
    for pos, c in enumerate(body):
        if pos < core_len:
            if c not in alphabet.symbols:
                raise InvalidResidue(seq.id, pos, c)
        elif c != alphabet.pad_symbol:
            raise InvalidResidue(seq.id, pos, c)


def drop_invalid(seqs: Iterable[Sequence], alphabet: Alphabet = PROTEIN) -> tuple[list[Sequence], list[str]]:
    kept, dropped = [], []
    for s in seqs:
        try:
            check_residues(s, alphabet)
        except InvalidResidue:
            dropped.append(s.id)
        else:
            kept.append(s)
    if dropped:
        log.warning("dropped %d sequence(s) with invalid residues", len(dropped))
    return kept, dropped


def pad_to_common_length(ds: LabeledDataset, alphabet: Alphabet = PROTEIN) -> LabeledDataset:
    """Right-pad every sequence with the pad symbol to the dataset's max length."""
    for s in ds.sequences:
        check_residues(s, alphabet)
    s_max = max(len(s) for s in ds.sequences)
    padded = tuple(
        s if len(s) == s_max else Sequence(s.id, s.residues.ljust(s_max, alphabet.pad_symbol))
        for s in ds.sequences
    )
    return LabeledDataset(padded, ds.labels, dict(ds.class_index))


def require_common_length(ds: LabeledDataset) -> int:
    s = ds.common_length
    if s is None:
        raise ShapeMismatch("sequences differ in length; pad the dataset first")
    return s
