from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import StrEnum
from typing import Self

import numpy as np

from ..errors import EmptyReferenceError
from ..text import normalize_word


class AlignOpKind(StrEnum):
    """Edit operations linking a reference word to a hypothesis word."""

    MATCH = "match"
    SUBSTITUTE = "substitute"
    DELETE = "delete"
    INSERT = "insert"


@dataclass(frozen=True, slots=True)
class AlignOp:
    """One step of a word alignment."""

    kind: AlignOpKind
    ref_index: int | None = None
    hyp_index: int | None = None

    def __post_init__(self):
        has_ref = self.kind != AlignOpKind.INSERT
        has_hyp = self.kind != AlignOpKind.DELETE
        if has_ref != (self.ref_index is not None) or has_hyp != (
            self.hyp_index is not None
        ):
            raise ValueError(
                f"Bad indices for {self.kind}: ref_index={self.ref_index}, "
                f"hyp_index={self.hyp_index}"
            )


@dataclass(frozen=True, slots=True)
class Alignment:
    """A minimum-cost word alignment between a reference and a hypothesis."""

    ops: tuple[AlignOp, ...]
    ref_len: int
    hyp_len: int

    def count(self, kind: AlignOpKind) -> int:
        """Count the operations of one kind."""
        return sum(op.kind == kind for op in self.ops)

    @property
    def substitutions(self) -> int:
        """Number of substituted words."""
        return self.count(AlignOpKind.SUBSTITUTE)

    @property
    def deletions(self) -> int:
        """Number of reference words missing from the hypothesis."""
        return self.count(AlignOpKind.DELETE)

    @property
    def insertions(self) -> int:
        """Number of hypothesis words with no reference counterpart."""
        return self.count(AlignOpKind.INSERT)

    @property
    def cost(self) -> int:
        """Total unit cost of the alignment."""
        return len(self.ops) - self.count(AlignOpKind.MATCH)


@dataclass(frozen=True, slots=True)
class WerReport:
    """Word error rate with its deletion / insertion / substitution breakdown.

    Rates are percentages of the reference word count. Reports add up by pooling
    their counts.
    """

    n_ref: int
    deletions: int = 0
    insertions: int = 0
    substitutions: int = 0

    def __post_init__(self):
        if self.n_ref <= 0:
            raise EmptyReferenceError("WER is undefined for an empty reference.")

    def __add__(self, other: Self) -> Self:
        return type(self)(
            self.n_ref + other.n_ref,
            self.deletions + other.deletions,
            self.insertions + other.insertions,
            self.substitutions + other.substitutions,
        )

    def __str__(self) -> str:
        return (
            f"{self.wer:.1f} ({self.del_rate:.1f}/{self.ins_rate:.1f}/"
            f"{self.sub_rate:.1f})"
        )

    @property
    def errors(self) -> int:
        """Total number of word errors."""
        return self.deletions + self.insertions + self.substitutions

    @property
    def wer(self) -> float:
        """Word error rate, in percent."""
        return 100 * self.errors / self.n_ref

    @property
    def del_rate(self) -> float:
        """Deletion rate, in percent."""
        return 100 * self.deletions / self.n_ref

    @property
    def ins_rate(self) -> float:
        """Insertion rate, in percent."""
        return 100 * self.insertions / self.n_ref

    @property
    def sub_rate(self) -> float:
        """Substitution rate, in percent."""
        return 100 * self.substitutions / self.n_ref

    def to_dict(self) -> dict[str, float | int]:
        """Serialize the counts and the rates derived from them."""
        return {
            "n_ref": self.n_ref,
            "deletions": self.deletions,
            "insertions": self.insertions,
            "substitutions": self.substitutions,
            "wer": self.wer,
            "del_rate": self.del_rate,
            "ins_rate": self.ins_rate,
            "sub_rate": self.sub_rate,
        }


def _encode(ref: Sequence[str], hyp: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
    vocab: dict[str, int] = {}

    def ids(words: Sequence[str]) -> np.ndarray:
        return np.array(
            [vocab.setdefault(normalize_word(w).norm, len(vocab)) for w in words],
            dtype=np.int64,
        )

    return ids(ref), ids(hyp)


def _distance_matrix(ref: np.ndarray, hyp: np.ndarray, sub: int) -> np.ndarray:
    """Fill the weighted edit table one reference row at a time.

    Substitutions cost `sub` and insertions or deletions `sub + 1`. Within a row
    the insertion recurrence `d[j] = min(d[j], d[j - 1] + w)` is a running minimum
    of `d[k] - w * k`, which numpy evaluates without a Python loop.
    """
    n, m = len(ref), len(hyp)
    indel = sub + 1
    cols = indel * np.arange(m + 1)
    dist = np.empty((n + 1, m + 1), dtype=np.int64)
    dist[0] = cols
    for i in range(1, n + 1):
        row = np.empty(m + 1, dtype=np.int64)
        row[0] = i * indel
        row[1:] = np.minimum(
            dist[i - 1, 1:] + indel,
            dist[i - 1, :-1] + sub * (hyp != ref[i - 1]),
        )
        dist[i] = np.minimum.accumulate(row - cols) + cols
    return dist


def align(ref: Sequence[str], hyp: Sequence[str]) -> Alignment:
    """Align a hypothesis to a reference with unit edit costs.

    Words are compared after normalization, so case and punctuation do not count
    as errors. Among alignments with the fewest edits the one with the fewest
    insertions and deletions wins, which fixes the deletion, insertion and
    substitution counts and makes them mirror each other when the two sides are
    swapped. Remaining ties are broken by the backtrace, which prefers, at every
    step, match over substitution over deletion over insertion.

    Parameters
    ----------
    ref : Sequence[str]
        Reference words
    hyp : Sequence[str]
        Hypothesis words

    Returns
    -------
    Alignment
        A minimum-cost alignment; identical inputs always give identical ops
    """
    ref_ids, hyp_ids = _encode(ref, hyp)
    # Heavier than any number of insertions and deletions put together
    sub = len(ref) + len(hyp) + 1
    indel = sub + 1
    dist = _distance_matrix(ref_ids, hyp_ids, sub)

    ops = []
    i, j = len(ref), len(hyp)
    while i > 0 or j > 0:
        here = dist[i, j]
        if i > 0 and j > 0:
            same = ref_ids[i - 1] == hyp_ids[j - 1]
            if same and here == dist[i - 1, j - 1]:
                ops.append(AlignOp(AlignOpKind.MATCH, i - 1, j - 1))
                i, j = i - 1, j - 1
                continue
            if not same and here == dist[i - 1, j - 1] + sub:
                ops.append(AlignOp(AlignOpKind.SUBSTITUTE, i - 1, j - 1))
                i, j = i - 1, j - 1
                continue
        if i > 0 and here == dist[i - 1, j] + indel:
            ops.append(AlignOp(AlignOpKind.DELETE, ref_index=i - 1))
            i -= 1
        else:
            ops.append(AlignOp(AlignOpKind.INSERT, hyp_index=j - 1))
            j -= 1

    return Alignment(tuple(reversed(ops)), len(ref), len(hyp))


def wer_report(alignment: Alignment) -> WerReport:
    """Summarize an alignment as a WER report.

    Raises
    ------
    EmptyReferenceError
        If the reference has no words
    """
    return WerReport(
        alignment.ref_len,
        alignment.deletions,
        alignment.insertions,
        alignment.substitutions,
    )


def corpus_wer(records: Iterable[tuple[Sequence[str], Sequence[str]]]) -> WerReport:
    """Pool error counts over a corpus of (reference, hypothesis) pairs.

    The corpus WER is total errors over total reference words, not the mean of
    per-utterance rates. Records with an empty reference contribute their
    insertions only.

    Raises
    ------
    EmptyReferenceError
        If every reference is empty
    """
    n_ref = deletions = insertions = substitutions = 0
    for ref, hyp in records:
        a = align(ref, hyp)
        n_ref += a.ref_len
        deletions += a.deletions
        insertions += a.insertions
        substitutions += a.substitutions
    return WerReport(n_ref, deletions, insertions, substitutions)
