import logging
from collections.abc import Sequence
from dataclasses import dataclass, replace
from enum import StrEnum

from ..errors import EnumerationCapExceeded
from ..text import NormalizedWord, normalize_seq
from ..transcript import Speaker, TaggedTranscript, Token, render_tagged
from ..transcript.model import tag_for
from .embedding import Embedding, RelabelOptions, find_embeddings, min_edits

logger = logging.getLogger(__name__)


class RelabelStatus(StrEnum):
    """How relabeling an utterance turned out."""

    TAGGED = "tagged"
    FALLBACK_NO_MATCH = "fallback_no_match"
    FALLBACK_AMBIGUOUS = "fallback_ambiguous"


@dataclass(frozen=True, slots=True)
class RelabelOutcome:
    """The result of relabeling one utterance.

    On fallback `transcript` holds the original truth without any tags and `text`
    is the original truth byte for byte.
    """

    status: RelabelStatus
    transcript: TaggedTranscript
    text: str
    match_count: int
    edits: int = 0

    @property
    def tagged(self) -> bool:
        """Whether speaker-tags were inserted."""
        return self.status == RelabelStatus.TAGGED


def insert_tags(A: Sequence[NormalizedWord], embedding: Embedding) -> TaggedTranscript:
    """Insert speaker-tags into the all-speech transcript.

    Words placed by `embedding` (including absorbed words) are primary, all others
    are not. Each maximal run is closed by the matching tag, the last one included.
    Tokens that normalize to nothing join the run of the word before them, or the
    run after them if they open the transcript.

    Parameters
    ----------
    A : Sequence[NormalizedWord]
        Normalized all-speech transcript; surface forms are emitted verbatim
    embedding : Embedding
        A valid embedding of the primary transcript into `A`

    Returns
    -------
    TaggedTranscript
        `A` with a tag after every run of words
    """
    primary = embedding.primary_positions
    labels = [
        None if w.is_empty else (Speaker.PRIMARY if j in primary else Speaker.OTHERS)
        for j, w in enumerate(A)
    ]
    current = next((label for label in labels if label is not None), Speaker.OTHERS)

    tokens: list[Token] = []
    for word, label in zip(A, labels, strict=True):
        label = label or current
        if tokens and label != current:
            tokens.append(tag_for(current))
        current = label
        tokens.append(Token.word(word.surface))

    if tokens:
        tokens.append(tag_for(current))
    return TaggedTranscript(tuple(tokens))


def strip_trailing_tag(transcript: TaggedTranscript) -> TaggedTranscript:
    """Remove the final token if it is a speaker-tag.

    Chunks cut from longer audio end at an arbitrary point, so the last speaker has
    not necessarily finished.
    """
    if transcript.tokens and transcript.tokens[-1].is_tag:
        return TaggedTranscript(transcript.tokens[:-1])
    return transcript


def tagged_outputs(
    P: Sequence[NormalizedWord],
    A: Sequence[NormalizedWord],
    opts: RelabelOptions | None = None,
) -> tuple[list[TaggedTranscript], bool]:
    """Get the distinct tagged transcripts the primary transcript can produce.

    Only embeddings using the fewest edits are considered: edits tolerate a
    difference when no exact placement exists, they never compete with one.

    Parameters
    ----------
    P : Sequence[NormalizedWord]
        Normalized primary-speaker transcript
    A : Sequence[NormalizedWord]
        Normalized all-speech transcript
    opts : RelabelOptions | None
        Edit budget and enumeration cap

    Returns
    -------
    tuple[list[TaggedTranscript], bool]
        The distinct outputs in order of discovery, and whether the enumeration cap
        was hit
    """
    opts = opts or RelabelOptions()
    tier = min_edits(P, A)
    if tier > opts.edit_budget:
        return [], False

    capped = False
    try:
        embeddings = find_embeddings(P, A, replace(opts, edit_budget=tier))
    except EnumerationCapExceeded as e:
        embeddings = e.embeddings
        capped = True

    outputs: dict[str, TaggedTranscript] = {}
    for emb in embeddings:
        tagged = insert_tags(A, emb)
        outputs.setdefault(render_tagged(tagged), tagged)
    return list(outputs.values()), capped


def relabel(
    trans_primary: str,
    trans_all: str,
    original_truth: str,
    opts: RelabelOptions | None = None,
) -> RelabelOutcome:
    """Relabel one utterance with speaker-tags.

    Only minimum-edit embeddings take part, so absorbed words never reach the
    output here: dropping an absorb from an embedding always gives a cheaper one.
    `find_embeddings` still lists them for callers that want every embedding within
    the budget.

    Parameters
    ----------
    trans_primary : str
        Transcript of the primary speaker only
    trans_all : str
        Transcript of all speech
    original_truth : str
        Ground truth for the utterance's domain; used verbatim on fallback
    opts : RelabelOptions | None
        Edit budget, enumeration cap and whether the utterance is a chunk

    Returns
    -------
    RelabelOutcome
        Tagged when exactly one distinct tagged transcript exists, otherwise a
        fallback to `original_truth`
    """
    opts = opts or RelabelOptions()
    P = normalize_seq(trans_primary.split())
    A = normalize_seq(trans_all.split())

    def fallback(status: RelabelStatus, count: int) -> RelabelOutcome:
        logger.debug("Falling back (%s, %d outputs): %r", status, count, trans_all)
        words = TaggedTranscript(tuple(Token.word(w) for w in original_truth.split()))
        return RelabelOutcome(status, words, original_truth, count)

    if all(w.is_empty for w in A):
        return fallback(RelabelStatus.FALLBACK_NO_MATCH, 0)

    outputs, capped = tagged_outputs(P, A, opts)
    if not outputs:
        return fallback(RelabelStatus.FALLBACK_NO_MATCH, 0)
    if capped or len(outputs) > 1:
        return fallback(RelabelStatus.FALLBACK_AMBIGUOUS, len(outputs))

    tagged = outputs[0]
    if opts.segmented:
        tagged = strip_trailing_tag(tagged)
    return RelabelOutcome(
        RelabelStatus.TAGGED,
        tagged,
        render_tagged(tagged),
        1,
        min_edits(P, A),
    )
