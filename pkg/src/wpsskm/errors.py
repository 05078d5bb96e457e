"""Exception types raised across the package.

Every error derives from :class:`PsskmError` (itself a ``ValueError``) so the
CLI can map any of them to exit code 1 with a single handler.
"""
from __future__ import annotations


class PsskmError(ValueError):
    pass


class EmptyInput(PsskmError):
    pass


class EmptyRecord(PsskmError):
    def __init__(self, record_index: int, record_id: str = ""):
        self.record_index = record_index
        self.record_id = record_id
        super().__init__(f"record {record_index} ({record_id!r}) has an empty sequence body")


class DuplicateId(PsskmError):
    def __init__(self, record_index: int, record_id: str):
        self.record_index = record_index
        self.record_id = record_id
        super().__init__(f"record {record_index} repeats id {record_id!r}")


class MalformedFasta(PsskmError):
    pass


class MissingLabel(PsskmError):
    def __init__(self, seq_id: str):
        self.seq_id = seq_id
        super().__init__(f"no label for sequence {seq_id!r}")


class InvalidResidue(PsskmError):
    def __init__(self, seq_id: str, position: int, char: str):
        self.seq_id = seq_id
        self.position = position
        self.char = char
        super().__init__(f"sequence {seq_id!r} has invalid residue {char!r} at position {position}")


class NotAnAminoAcid(PsskmError):
    pass


class AllPadding(PsskmError):
    pass


class ShapeMismatch(PsskmError):
    pass


class NonSymmetric(PsskmError):
    pass


class NegativeSpectrum(PsskmError):
    pass


class EmptySpectrum(PsskmError):
    pass


class InvalidSpacedParams(PsskmError):
    pass


class DimMismatch(PsskmError):
    pass


class StratificationImpossible(PsskmError):
    def __init__(self, label: str, count: int):
        self.label = label
        super().__init__(f"class {label!r} has {count} member(s); need at least 2 to stratify")


class Diverged(PsskmError):
    pass
