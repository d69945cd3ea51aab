import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from ..errors import InvalidSpecError
from ..metrics.longform import (
    DeletionRun,
    Domain,
    NoiseWindow,
    TimedWord,
    UtteranceRecord,
)
from ..relabel import RelabelStatus, strip_trailing_tag
from ..transcript import Speaker, TaggedTranscript, Token, render_tagged
from ..transcript.model import tag_for
from .failures import FailureModel
from .vocabulary import FILLERS, VOCABULARY

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SynthSpec:
    """Shape of a synthetic corpus.

    Eval corpora use `n_utts`, `words_per_utt`, `word_duration`, the noise settings,
    `domain` and `latency_range`. Relabel corpora use `n_utts`, the segment sizes
    and the case rates; rates left at zero give only clean pairs.
    """

    n_utts: int = 100
    words_per_utt: int = 200
    word_duration: float = 0.3
    noise_placement: float = 0.25
    noise_words: int = 10
    domain: Domain = Domain.DICTATION
    latency_range: tuple[float, float] = (0.1, 1.0)
    max_segments: int = 4
    max_segment_words: int = 5
    perturb_rate: float = 0.0
    ambiguity_rate: float = 0.0
    empty_primary_rate: float = 0.0
    segmented_rate: float = 0.0

    def __post_init__(self):
        if self.n_utts < 1:
            raise InvalidSpecError(f"n_utts must be >= 1; got {self.n_utts}")
        if not 1 <= self.words_per_utt <= len(VOCABULARY):
            raise InvalidSpecError(
                f"words_per_utt must be in [1, {len(VOCABULARY)}]; "
                f"got {self.words_per_utt}"
            )
        if self.word_duration <= 0:
            raise InvalidSpecError(
                f"word_duration must be positive; got {self.word_duration}"
            )
        if not 0 < self.noise_placement < 1:
            raise InvalidSpecError(
                f"noise_placement must be in (0, 1); got {self.noise_placement}"
            )
        if self.noise_words < 1:
            raise InvalidSpecError(f"noise_words must be >= 1; got {self.noise_words}")
        low, high = self.latency_range
        if not 0 <= low <= high:
            raise InvalidSpecError(f"Bad latency range {self.latency_range}")

        rates = (self.perturb_rate, self.ambiguity_rate, self.empty_primary_rate)
        in_range = all(0 <= r <= 1 for r in (*rates, self.segmented_rate))
        if not in_range or sum(rates) > 1:
            raise InvalidSpecError(
                "Case rates must be in [0, 1] and perturb, ambiguity and empty-primary "
                "rates must sum to at most 1."
            )
        if self.max_segments < 1 or self.max_segment_words < 1:
            raise InvalidSpecError("Relabel pairs need at least one word and segment.")
        if self.ambiguity_rate > 0 and self.max_segments < 2:
            raise InvalidSpecError("Ambiguous pairs need max_segments >= 2.")
        if self.perturb_rate > 0 and self.max_segment_words < 2:
            raise InvalidSpecError("Perturbed pairs need max_segment_words >= 2.")
        if self.max_segments * self.max_segment_words > len(VOCABULARY):
            raise InvalidSpecError("Relabel pairs would not fit in the vocabulary.")

    def noise_word_range(self, n_words: int) -> tuple[int, int]:
        """Get the half-open range of word positions covered by the noise."""
        start = min(math.floor(self.noise_placement * n_words), n_words - 1)
        return start, min(n_words, start + self.noise_words)


@dataclass(frozen=True, slots=True)
class GroundTruth:
    """The deletion runs a failure model injected into one record."""

    id: str
    runs: tuple[DeletionRun, ...] = ()
    noise_end: float | None = None

    def expected_count(self, threshold: int) -> int:
        """Count injected runs of `threshold` or more words starting after the noise."""
        return sum(
            run.length >= threshold
            and (self.noise_end is None or run.first_word_start >= self.noise_end)
            for run in self.runs
        )


def _runs_from_indices(
    deleted: tuple[int, ...], ref: list[TimedWord]
) -> list[DeletionRun]:
    runs = []
    for i in deleted:
        if runs and runs[-1].last_ref_index == i - 1:
            first = runs.pop()
            runs.append(DeletionRun(first.first_ref_index, i, first.first_word_start))
        else:
            runs.append(DeletionRun(i, i, ref[i].start))
    return runs


def record_rng(seed: int, index: int) -> np.random.Generator:
    """Get the generator for one record, independent of every other record's."""
    return np.random.default_rng([seed, index])


def generate_record(
    spec: SynthSpec, model: FailureModel, index: int
) -> tuple[UtteranceRecord, GroundTruth]:
    """Generate one eval record and what was injected into it.

    Parameters
    ----------
    spec : SynthSpec
        Corpus shape
    model : FailureModel
        Simulated recognizer; its seed and `index` fix the record
    index : int
        Position of the record in the corpus

    Returns
    -------
    tuple[UtteranceRecord, GroundTruth]
        The record and its injected deletion runs
    """
    rng = record_rng(model.seed, index)
    n, d = spec.words_per_utt, spec.word_duration
    picks = rng.choice(len(VOCABULARY), size=n, replace=False)
    ref = [TimedWord(VOCABULARY[k], i * d, (i + 1) * d) for i, k in enumerate(picks)]

    noise_words = spec.noise_word_range(n)
    noise = NoiseWindow(noise_words[0] * d, noise_words[1] * d)
    corruption = model.corrupt([w.word for w in ref], noise_words, rng)

    tokens = [Token.word(h.word, ref[h.anchor].end) for h in corruption.hyp]
    latency = float(rng.uniform(*spec.latency_range))
    tokens.append(Token.end_primary(ref[-1].end + latency))

    record_id = f"utt{index:06d}"
    record = UtteranceRecord(
        id=record_id,
        ref=tuple(ref),
        hyp=TaggedTranscript(tuple(tokens)),
        noise=noise,
        domain=spec.domain,
    )
    runs = _runs_from_indices(corruption.deleted, ref)
    return record, GroundTruth(record_id, tuple(runs), noise.end)


def iter_corpus(
    spec: SynthSpec, model: FailureModel
) -> Iterator[tuple[UtteranceRecord, GroundTruth]]:
    """Yield eval records one at a time, in index order."""
    logger.info("Generating %d %s records", spec.n_utts, model.kind)
    for index in range(spec.n_utts):
        yield generate_record(spec, model, index)


def generate_corpus(
    spec: SynthSpec, model: FailureModel
) -> tuple[list[UtteranceRecord], list[GroundTruth]]:
    """Generate a whole eval corpus with its ground truth.

    The same spec and model seed always give the same corpus.

    Raises
    ------
    InvalidSpecError
        If the model cannot be applied to references of this shape
    """
    records, truths = [], []
    for record, truth in iter_corpus(spec, model):
        records.append(record)
        truths.append(truth)
    return records, truths


class PairCase(StrEnum):
    """How a synthetic relabel pair was built."""

    CLEAN = "clean"
    PERTURBED = "perturbed"
    AMBIGUOUS = "ambiguous"
    EMPTY_PRIMARY = "empty_primary"


@dataclass(frozen=True, slots=True)
class RelabelPair:
    """A relabel input together with the outcome it was built to produce."""

    id: str
    trans_primary: str
    trans_all: str
    original_truth: str
    segmented: bool
    domain: Domain
    case: PairCase
    expected_status: RelabelStatus
    expected_transcript: str
    source: TaggedTranscript = field(default_factory=TaggedTranscript, compare=False)


def _pick_case(spec: SynthSpec, rng: np.random.Generator) -> PairCase:
    probs = [spec.perturb_rate, spec.ambiguity_rate, spec.empty_primary_rate]
    cases = [PairCase.PERTURBED, PairCase.AMBIGUOUS, PairCase.EMPTY_PRIMARY]
    probs.insert(0, max(0.0, 1 - sum(probs)))
    cases.insert(0, PairCase.CLEAN)
    return cases[rng.choice(len(cases), p=np.asarray(probs) / sum(probs))]


def _segment_plan(
    spec: SynthSpec, case: PairCase, rng: np.random.Generator
) -> list[tuple[Speaker, int]]:
    if case == PairCase.EMPTY_PRIMARY:
        return [(Speaker.OTHERS, int(rng.integers(1, spec.max_segment_words + 1)))]

    low_segments = 2 if case == PairCase.AMBIGUOUS else 1
    n_segments = int(rng.integers(low_segments, spec.max_segments + 1))
    if case == PairCase.CLEAN:
        first = Speaker.PRIMARY if rng.random() < 0.5 else Speaker.OTHERS
    else:
        first = Speaker.PRIMARY

    plan = []
    speaker = first
    for k in range(n_segments):
        low_words = 2 if (k == 0 and case == PairCase.PERTURBED) else 1
        plan.append((speaker, int(rng.integers(low_words, spec.max_segment_words + 1))))
        speaker = Speaker.OTHERS if speaker == Speaker.PRIMARY else Speaker.PRIMARY
    return plan


def generate_relabel_pair(spec: SynthSpec, seed: int, index: int) -> RelabelPair:
    """Build one relabel pair by tagging words first and deriving both transcripts.

    Perturbed pairs add a filler inside the first primary segment of the primary
    transcript only, which one edit tolerates. Ambiguous pairs copy the last word of
    the first primary segment into the following others segment of the all-speech
    transcript, so that word has two valid placements.
    """
    rng = record_rng(seed, index)
    case = _pick_case(spec, rng)
    plan = _segment_plan(spec, case, rng)
    domain = list(Domain)[int(rng.integers(len(Domain)))]
    segmented = bool(rng.random() < spec.segmented_rate)

    total = sum(n for _, n in plan)
    picks = iter(rng.choice(len(VOCABULARY), size=total, replace=False))
    groups = [
        (speaker, [VOCABULARY[next(picks)] for _ in range(n)]) for speaker, n in plan
    ]

    tokens = []
    for speaker, words in groups:
        tokens += [Token.word(w) for w in words]
        tokens.append(tag_for(speaker))
    source = TaggedTranscript(tuple(tokens))

    primary = [w for spk, words in groups if spk == Speaker.PRIMARY for w in words]
    every = [w for _, words in groups for w in words]

    if case == PairCase.PERTURBED:
        gap = int(rng.integers(1, len(groups[0][1])))
        primary.insert(gap, FILLERS[int(rng.integers(len(FILLERS)))])
    elif case == PairCase.AMBIGUOUS:
        first_words, others_words = groups[0][1], groups[1][1]
        at = len(first_words) + int(rng.integers(len(others_words) + 1))
        every.insert(at, first_words[-1])

    trans_primary, trans_all = " ".join(primary), " ".join(every)
    original_truth = trans_primary if domain.primary_only else trans_all

    if case == PairCase.AMBIGUOUS:
        status, expected = RelabelStatus.FALLBACK_AMBIGUOUS, original_truth
    else:
        status = RelabelStatus.TAGGED
        expected = render_tagged(strip_trailing_tag(source) if segmented else source)

    return RelabelPair(
        id=f"pair{index:06d}",
        trans_primary=trans_primary,
        trans_all=trans_all,
        original_truth=original_truth,
        segmented=segmented,
        domain=domain,
        case=case,
        expected_status=status,
        expected_transcript=expected,
        source=source,
    )


def generate_relabel_pairs(spec: SynthSpec, seed: int) -> list[RelabelPair]:
    """Generate `spec.n_utts` relabel pairs whose outcomes are known by construction.

    Raises
    ------
    InvalidSpecError
        If the requested segment sizes or case rates cannot be satisfied
    """
    return [generate_relabel_pair(spec, seed, index) for index in range(spec.n_utts)]
