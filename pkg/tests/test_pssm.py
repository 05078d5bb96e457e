import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import char_counts
from wpsskm.errors import AllPadding, NotAnAminoAcid
from wpsskm.pssm import aa_index, build_profiles, compute_pssm, weight_vector, write_pssm_csv
from wpsskm.seqio import AMINO_ACIDS, Sequence


def test_aa_index_ends():
    assert aa_index("A") == 0
    assert aa_index("Y") == 19


@pytest.mark.parametrize("c", ["-", "B", "X", "a", ""])
def test_aa_index_rejects(c):
    with pytest.raises(NotAnAminoAcid):
        aa_index(c)


def test_pssm_one_hot_rows():
    p = compute_pssm(Sequence("s", "ACD"))
    expected = np.zeros((3, 20), dtype=int)
    expected[0, 0] = expected[1, 1] = expected[2, 2] = 1
    assert p.seq_len == 3
    np.testing.assert_array_equal(p.counts, expected)


def test_pssm_repeated_residue():
    p = compute_pssm(Sequence("s", "AA"))
    assert p.counts[0, 0] == p.counts[1, 0] == 1
    assert p.counts.sum() == 2


def test_pssm_pad_rows_are_zero():
    p = compute_pssm(Sequence("s", "A-"))
    assert p.counts[0, 0] == 1
    assert not p.counts[1].any()


def test_weight_vector_examples():
    w = weight_vector(compute_pssm(Sequence("s", "AAC"))).w
    assert w[0] == pytest.approx(2 / 3) and w[1] == pytest.approx(1 / 3)
    assert w[2:].sum() == 0
    w = weight_vector(compute_pssm(Sequence("s", "ACDE"))).w
    np.testing.assert_allclose(w[:4], 0.25)
    w = weight_vector(compute_pssm(Sequence("s", "A---"))).w
    assert w[0] == 1.0


def test_weight_vector_all_padding():
    with pytest.raises(AllPadding):
        weight_vector(compute_pssm(Sequence("s", "--")))


seqs = st.builds(
    lambda body, pad: body + "-" * pad,
    st.text(alphabet=AMINO_ACIDS, min_size=1, max_size=80),
    st.integers(0, 10),
)


@given(seqs)
def test_pssm_invariants(x):
    p = compute_pssm(Sequence("s", x))
    rows = p.counts.sum(axis=1)
    assert set(rows.tolist()) <= {0, 1}
    assert p.counts.sum() == len(x.rstrip("-"))
    counts = char_counts(x)
    for l, c in enumerate(AMINO_ACIDS):
        assert p.column_sums[l] == counts.get(c, 0)
    w = weight_vector(p).w
    assert abs(w.sum() - 1.0) <= 1e-12


@given(st.lists(seqs, min_size=1, max_size=5))
def test_profile_cache_matches_per_sequence(xs):
    s = max(map(len, xs))
    padded = [Sequence(f"s{i}", x.ljust(s, "-")) for i, x in enumerate(xs)]
    prof = build_profiles(padded)
    for i, seq in enumerate(padded):
        np.testing.assert_array_equal(prof.weights[i, :20], weight_vector(compute_pssm(seq)).w)
        assert prof.weights[i, 20] == 0.0


def test_pssm_deterministic():
    a = compute_pssm(Sequence("s", "MKV-"))
    b = compute_pssm(Sequence("t", "MKV-"))
    np.testing.assert_array_equal(a.counts, b.counts)


def test_pssm_csv(tmp_path):
    path = tmp_path / "p.csv"
    write_pssm_csv(compute_pssm(Sequence("s", "AC")), path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(AMINO_ACIDS)
    assert lines[1].split(",")[:2] == ["1", "0"]
    assert len(lines) == 3
