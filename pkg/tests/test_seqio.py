import logging

import pytest
from hypothesis import given, strategies as st

from wpsskm.errors import DuplicateId, EmptyInput, EmptyRecord, InvalidResidue, MissingLabel
from wpsskm.seqio import (
    PROTEIN,
    Alphabet,
    Sequence,
    attach_labels,
    drop_invalid,
    format_fasta,
    parse_fasta,
    parse_label_table,
    pad_to_common_length,
    unlabeled,
)


def test_single_record():
    assert parse_fasta(b">s1\nACD\n") == [Sequence("s1", "ACD")]


def test_wrapped_lines_concatenate():
    seqs = parse_fasta(b">s1\nAC\nD\n>s2\nKLM\n")
    assert [(s.id, s.residues) for s in seqs] == [("s1", "ACD"), ("s2", "KLM")]


def test_header_id_stops_at_whitespace_and_residues_uppercase():
    (s,) = parse_fasta(">sp|P1 some description\nacdE\n")
    assert s.id == "sp|P1"
    assert s.residues == "ACDE"


def test_empty_record_reports_index():
    with pytest.raises(EmptyRecord) as exc:
        parse_fasta(b">s1\n\n")
    assert exc.value.record_index == 0


def test_empty_file():
    with pytest.raises(EmptyInput):
        parse_fasta(b"")


def test_duplicate_ids_report_index():
    with pytest.raises(DuplicateId) as exc:
        parse_fasta(">a\nAC\n>b\nAC\n>a\nKL\n")
    assert exc.value.record_index == 2


ids = st.text(alphabet="abcdefghij0123456789_|", min_size=1, max_size=8)
bodies = st.text(alphabet=PROTEIN.symbols, min_size=1, max_size=150)


@given(st.lists(st.tuples(ids, bodies), min_size=1, max_size=6, unique_by=lambda t: t[0]),
       st.integers(1, 80))
def test_roundtrip_identity(records, width):
    seqs = [Sequence(i, r) for i, r in records]
    again = parse_fasta(format_fasta(seqs, width=width).encode())
    assert [(s.id, s.residues) for s in again] == records


def test_attach_labels_first_appearance():
    ds = attach_labels([Sequence("s1", "A"), Sequence("s2", "C")], {"s1": "Human", "s2": "Bat"})
    assert ds.class_index == {"Human": 0, "Bat": 1}


def test_attach_labels_missing():
    with pytest.raises(MissingLabel, match="s1"):
        attach_labels([Sequence("s1", "A")], {})


def test_attach_labels_counts():
    ds = attach_labels([Sequence(f"s{i}", "A") for i in (1, 2, 3)], {"s1": "A", "s2": "A", "s3": "B"})
    assert len(ds.class_index) == 2
    assert ds.label_counts() == {"A": 2, "B": 1}


def test_attach_labels_warns_about_unused_rows(caplog):
    with caplog.at_level(logging.WARNING):
        attach_labels([Sequence("s1", "A")], {"s1": "x", "s9": "y", "s8": "y"})
    assert "2 label table entries" in caplog.text


def test_label_table_skips_comments():
    table = parse_label_table("# header\ns1\tHuman\n\ns2\tBat\n")
    assert table == {"s1": "Human", "s2": "Bat"}


def test_padding_to_max():
    ds = pad_to_common_length(unlabeled([Sequence("a", "AC"), Sequence("b", "ACDE")]))
    assert [s.residues for s in ds.sequences] == ["AC--", "ACDE"]
    assert ds.common_length == 4


def test_padding_identity_on_equal_lengths():
    ds = unlabeled([Sequence("a", "KLM"), Sequence("b", "KLM")])
    assert pad_to_common_length(ds).sequences == ds.sequences


def test_padding_rejects_unknown_residue():
    with pytest.raises(InvalidResidue) as exc:
        pad_to_common_length(unlabeled([Sequence("x", "ACBD")]))
    assert (exc.value.seq_id, exc.value.position, exc.value.char) == ("x", 2, "B")


def test_padding_rejects_interior_pad():
    with pytest.raises(InvalidResidue):
        pad_to_common_length(unlabeled([Sequence("x", "A-C")]))


@given(st.lists(bodies, min_size=1, max_size=5))
def test_padding_idempotent(bodies):
    ds = unlabeled([Sequence(f"s{i}", b) for i, b in enumerate(bodies)])
    once = pad_to_common_length(ds)
    assert pad_to_common_length(once).sequences == once.sequences
    assert once.common_length == max(map(len, bodies))
    for orig, padded in zip(ds.sequences, once.sequences):
        assert padded.residues.startswith(orig.residues)


def test_drop_invalid():
    kept, dropped = drop_invalid([Sequence("a", "ACX"), Sequence("b", "ACD")])
    assert [s.id for s in kept] == ["b"] and dropped == ["a"]


def test_alphabet_invariants():
    assert len(PROTEIN.symbols) == 20 and PROTEIN.pad_symbol not in PROTEIN.symbols
    with pytest.raises(ValueError):
        Alphabet("ACDEFGHIKLMNPQRSTVWY", "A")
    with pytest.raises(ValueError):
        Alphabet("AACDEFGHIKLMNPQRSTV")
