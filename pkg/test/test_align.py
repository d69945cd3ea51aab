from functools import cache
from itertools import product

import numpy as np
import pytest

from pysptags.errors import EmptyReferenceError
from pysptags.metrics import (
    AlignOp,
    AlignOpKind,
    WerReport,
    align,
    corpus_wer,
    wer_report,
)


def _distance(ref: tuple[str, ...], hyp: tuple[str, ...]) -> int:
    @cache
    def d(i: int, j: int) -> int:
        if i == 0 or j == 0:
            return i + j
        return min(
            d(i - 1, j) + 1,
            d(i, j - 1) + 1,
            d(i - 1, j - 1) + (ref[i - 1] != hyp[j - 1]),
        )

    return d(len(ref), len(hyp))


def _check_alignment(ref, hyp):
    alignment = align(ref, hyp)
    assert alignment.cost == _distance(tuple(ref), tuple(hyp))

    # The ops walk both sequences once, in order
    refs = [op.ref_index for op in alignment.ops if op.ref_index is not None]
    hyps = [op.hyp_index for op in alignment.ops if op.hyp_index is not None]
    assert refs == list(range(len(ref)))
    assert hyps == list(range(len(hyp)))
    for op in alignment.ops:
        if op.kind == AlignOpKind.MATCH:
            assert ref[op.ref_index] == hyp[op.hyp_index]
        elif op.kind == AlignOpKind.SUBSTITUTE:
            assert ref[op.ref_index] != hyp[op.hyp_index]


def test_align_exhaustive():
    """Compare alignment costs with a recursive edit distance on all short pairs."""
    seqs = [s for n in range(6) for s in product("abc", repeat=n)]
    for ref in seqs:
        for hyp in seqs:
            _check_alignment(ref, hyp)


def test_align_random():
    """Compare alignment costs with a recursive edit distance on random pairs."""
    rng = np.random.default_rng(0)
    vocab = ["a", "b", "c"]
    for _ in range(5000):
        ref = [str(w) for w in rng.choice(vocab, size=rng.integers(0, 9))]
        hyp = [str(w) for w in rng.choice(vocab, size=rng.integers(0, 9))]
        _check_alignment(ref, hyp)


def test_align_metric_properties():
    """Check symmetry and the triangle inequality of the alignment cost."""
    rng = np.random.default_rng(1)
    vocab = ["a", "b", "c"]
    for _ in range(300):
        x, y, z = (
            [str(w) for w in rng.choice(vocab, size=rng.integers(0, 7))]
            for _ in range(3)
        )
        assert align(x, y).cost == align(y, x).cost
        assert align(x, z).cost <= align(x, y).cost + align(y, z).cost
        assert align(x, x).cost == 0
        assert align(x, y).deletions == align(y, x).insertions


def test_align_counts_mirror_when_swapped():
    """Test that swapping the two sides swaps deletions and insertions."""
    seqs = [s for n in range(5) for s in product("abc", repeat=n)]
    for x in seqs:
        for y in seqs:
            forward, backward = align(x, y), align(y, x)
            assert forward.deletions == backward.insertions, (x, y)
            assert forward.insertions == backward.deletions, (x, y)
            assert forward.substitutions == backward.substitutions, (x, y)


def test_align_prefers_substitutions_on_ties():
    """Test that two substitutions beat a deletion plus an insertion."""
    alignment = align(["a", "b"], ["b", "a"])
    assert alignment.substitutions == 2
    assert alignment.deletions == alignment.insertions == 0

    alignment = align("a b a".split(), "b a b".split())
    assert (alignment.deletions, alignment.insertions) == (1, 1)
    assert alignment.cost == 2


def test_align_tie_break():
    """Test that equally cheap alignments resolve the same way every time."""
    alignment = align(["a", "b"], ["c"])
    assert alignment.ops == (
        AlignOp(AlignOpKind.DELETE, ref_index=0),
        AlignOp(AlignOpKind.SUBSTITUTE, 1, 0),
    )


def test_align_normalizes_words():
    """Test that case and punctuation are not errors."""
    ref = "How tall is Barack Obama?".split()
    alignment = align(ref, "how tall is barack obama".split())
    assert alignment.cost == 0


def test_align_counts():
    """Test the deletion, insertion and substitution counts of a known pair."""
    alignment = align("a b c d e f g".split(), "a c d z e f h".split())
    report = wer_report(alignment)

    assert (report.deletions, report.insertions, report.substitutions) == (1, 1, 1)
    assert report.n_ref == 7
    assert report.wer == pytest.approx(300 / 7)


def test_align_op_validates_indices():
    """Test that an op must carry the indices its kind needs."""
    with pytest.raises(ValueError, match="Bad indices"):
        AlignOp(AlignOpKind.DELETE, ref_index=0, hyp_index=0)
    with pytest.raises(ValueError, match="Bad indices"):
        AlignOp(AlignOpKind.MATCH, ref_index=0)


def test_wer_report_str():
    """Test the `WER (D/I/S)` rendering."""
    report = WerReport(1000, deletions=648, insertions=4, substitutions=34)
    assert str(report) == "68.6 (64.8/0.4/3.4)"
    assert report.to_dict()["wer"] == pytest.approx(68.6)


def test_wer_report_empty_reference():
    """Test that WER over no reference words is an error."""
    with pytest.raises(EmptyReferenceError):
        wer_report(align([], ["a"]))
    with pytest.raises(EmptyReferenceError):
        corpus_wer([([], ["a"])])


def test_wer_reports_pool():
    """Test that adding reports pools their counts."""
    total = WerReport(10, 1, 0, 0) + WerReport(30, 2, 1, 0)
    assert total == WerReport(40, 3, 1, 0)
    assert total.wer == pytest.approx(10.0)


def test_corpus_wer_is_pooled():
    """Test that corpus WER weighs utterances by their length."""
    report = corpus_wer(
        [
            (["a"], ["b"]),
            ("a b c d e f g h i".split(), "a b c d e f g h i".split()),
        ]
    )
    # The per-utterance mean would be 50%
    assert report.wer == pytest.approx(10.0)
    assert report.n_ref == 10
