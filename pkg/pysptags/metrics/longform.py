from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import StrEnum

from ..errors import MissingTimingsError
from ..transcript import TaggedTranscript, ViewKind, view
from .align import Alignment, AlignOpKind, WerReport, align, wer_report

DEFAULT_THRESHOLD = 25


class Domain(StrEnum):
    """Application domains with different expectations about whose speech counts."""

    SHORT = "short"
    DICTATION = "dictation"
    CAPTION = "caption"

    @property
    def primary_only(self) -> bool:
        """Whether the domain transcribes only the primary speaker."""
        return self != Domain.CAPTION


@dataclass(frozen=True, slots=True)
class TimedWord:
    """A reference word with its start and end time in seconds."""

    word: str
    start: float | None = None
    end: float | None = None

    def __post_init__(self):
        if not self.word:
            raise ValueError("Timed words must not be empty.")
        if self.start is not None and self.end is not None and self.start > self.end:
            raise ValueError(
                f"Word {self.word!r} starts after it ends: {self.start} > {self.end}"
            )


@dataclass(frozen=True, slots=True)
class NoiseWindow:
    """The time range, in seconds, covered by a burst of noise."""

    start: float
    end: float

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ValueError(
                f"Noise windows need 0 <= start < end; got [{self.start}, {self.end}]"
            )


@dataclass(frozen=True, slots=True)
class DeletionRun:
    """A maximal stretch of consecutively deleted reference words."""

    first_ref_index: int
    last_ref_index: int
    first_word_start: float | None = None

    @property
    def length(self) -> int:
        """Number of deleted words."""
        return self.last_ref_index - self.first_ref_index + 1


@dataclass(frozen=True, slots=True)
class UtteranceRecord:
    """One evaluation unit: a timed reference and a (tagged) hypothesis stream."""

    id: str
    ref: tuple[TimedWord, ...]
    hyp: TaggedTranscript
    noise: NoiseWindow | None = None
    mic_close_time: float | None = None
    domain: Domain = Domain.CAPTION

    def __post_init__(self):
        starts = [w.start for w in self.ref if w.start is not None]
        ends = [w.end for w in self.ref if w.end is not None]
        for times in (starts, ends):
            if any(a > b for a, b in zip(times, times[1:], strict=False)):
                raise ValueError(f"Word times in {self.id!r} are not nondecreasing.")

    @property
    def ref_words(self) -> list[str]:
        """The reference words without timings."""
        return [w.word for w in self.ref]

    def hyp_words(self, primary_view: bool = False) -> list[str]:
        """The hypothesis words to score.

        Parameters
        ----------
        primary_view : bool
            If True and the domain transcribes only the primary speaker, score the
            primary-only view; otherwise every hypothesis word is scored
        """
        kind = ViewKind.ALL_SPEECH
        if primary_view and self.domain.primary_only:
            kind = ViewKind.PRIMARY_ONLY
        return view(self.hyp, kind).split()


@dataclass(frozen=True, slots=True)
class LongformReport:
    """Long-form deletion results for one utterance (or a pool of them)."""

    wer_report: WerReport
    run_count: int
    runs: tuple[DeletionRun, ...] = field(default=())
    threshold: int = DEFAULT_THRESHOLD


def deletion_runs(
    alignment: Alignment, ref: Sequence[TimedWord] | None = None
) -> list[DeletionRun]:
    """Find every maximal run of deletions in an alignment.

    Any emitted hypothesis word, whether matched, substituted or inserted, ends a
    run.

    Parameters
    ----------
    alignment : Alignment
        Alignment of a hypothesis against `ref`
    ref : Sequence[TimedWord] | None
        The reference the alignment was made over; used to stamp each run with the
        start time of its first deleted word

    Returns
    -------
    list[DeletionRun]
        Runs in reference order
    """
    runs = []
    first = last = None
    for op in (*alignment.ops, None):
        if op is not None and op.kind == AlignOpKind.DELETE:
            if first is None:
                first = op.ref_index
            last = op.ref_index
            continue

        if first is not None:
            start = ref[first].start if ref is not None else None
            runs.append(DeletionRun(first, last, start))
            first = last = None
    return runs


def passes_noise_gate(run: DeletionRun, noise: NoiseWindow | None) -> bool:
    """Check whether a deletion run starts at or after the end of the noise.

    Without a noise window every run passes.

    Raises
    ------
    MissingTimingsError
        If a noise window is given but the run has no start time
    """
    if noise is None:
        return True
    if run.first_word_start is None:
        raise MissingTimingsError(
            f"Deletion run at ref[{run.first_ref_index}] has no start time to compare "
            "against the noise window."
        )
    return run.first_word_start >= noise.end


def longform_count(
    record: UtteranceRecord,
    threshold: int = DEFAULT_THRESHOLD,
    primary_view: bool = False,
) -> LongformReport:
    """Count the long deletion runs that follow a burst of noise.

    A run counts when it deletes at least `threshold` consecutive reference words
    and its first deleted word starts at or after the end of the noise window.
    Runs that begin inside the noise are not counted, even if they extend past it.

    Parameters
    ----------
    record : UtteranceRecord
        Utterance to score
    threshold : int
        Minimum run length that counts
    primary_view : bool
        Score the primary-only view for Short and Dictation records

    Returns
    -------
    LongformReport
        WER breakdown, number of qualifying runs and all deletion runs found
    """
    alignment = align(record.ref_words, record.hyp_words(primary_view))
    runs = deletion_runs(alignment, record.ref)
    count = sum(
        run.length >= threshold and passes_noise_gate(run, record.noise) for run in runs
    )
    return LongformReport(wer_report(alignment), count, tuple(runs), threshold)
