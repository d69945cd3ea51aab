from dataclasses import dataclass
from enum import StrEnum

from .model import Segment, Speaker, TaggedTranscript, Token, TokenKind, segments

END_OF_SPEECH = "<end-of-speech>"


class ViewKind(StrEnum):
    """The two per-domain outputs that can be produced from a tagged transcript."""

    PRIMARY_ONLY = "primary"
    ALL_SPEECH = "all"


class EndpointMode(StrEnum):
    """What closes the microphone.

    `MERGED` treats the first `<end-primary>` as the end-of-speech signal; `SEPARATE`
    waits for an explicit `<end-of-speech>` token in the decoded stream.
    """

    MERGED = "merged"
    SEPARATE = "separate"


@dataclass(frozen=True, slots=True)
class MicCloseResult:
    """The words heard before the microphone closed, and when it closed.

    `closed` records whether a close token was found at all; `close_time` is None
    when the token was found but carries no emit time.
    """

    text: str
    closed: bool = False
    close_time: float | None = None


def canonicalize_tags(transcript: TaggedTranscript) -> TaggedTranscript:
    """Collapse repeated tags in decoder output.

    Empty segments are dropped and consecutive segments spoken by the same group are
    merged, keeping the tag (and emit time) of the last one. The result alternates
    tags strictly, except that a trailing untagged run is left as it is.

    Parameters
    ----------
    transcript : TaggedTranscript
        Transcript to clean up; may contain leading or back-to-back tags

    Returns
    -------
    TaggedTranscript
        The canonical transcript. Applying this function again returns it unchanged.
    """
    merged: list[Segment] = []
    for seg in segments(transcript):
        if not seg.words:
            continue
        if merged and merged[-1].speaker == seg.speaker:
            prev = merged.pop()
            seg = Segment(seg.speaker, prev.words + seg.words, seg.tag)
        merged.append(seg)

    tokens: list[Token] = []
    for seg in merged:
        tokens.extend(seg.words)
        if seg.tag is not None:
            tokens.append(seg.tag)
    return TaggedTranscript(tuple(tokens))


def view(transcript: TaggedTranscript, kind: ViewKind) -> str:
    """Render the text one application domain expects to see.

    A trailing untagged run counts as primary speech: models trained on segmented
    data legitimately stop before the closing tag.

    Parameters
    ----------
    transcript : TaggedTranscript
        Tagged transcript, canonical or not
    kind : ViewKind
        `PRIMARY_ONLY` keeps only the primary speaker's words; `ALL_SPEECH` keeps
        every word

    Returns
    -------
    str
        Space-joined words with all tags removed
    """
    if kind == ViewKind.ALL_SPEECH:
        return " ".join(w.text for w in transcript.words)

    return " ".join(
        w.text
        for seg in segments(canonicalize_tags(transcript))
        if seg.speaker != Speaker.OTHERS
        for w in seg.words
    )


def endpoint_truncate(
    transcript: TaggedTranscript,
    mode: EndpointMode = EndpointMode.MERGED,
) -> MicCloseResult:
    """Simulate the microphone closing on the endpointer signal.

    Parameters
    ----------
    transcript : TaggedTranscript
        Decoded stream; tag tokens should carry emit times where known
    mode : EndpointMode
        `MERGED` closes on the first `<end-primary>`; `SEPARATE` closes on the first
        `<end-of-speech>` word token

    Returns
    -------
    MicCloseResult
        Words emitted strictly before the close token, and that token's emit time.
        If no close token exists every word is kept and `closed` is False.
    """
    kept = []
    for tok in transcript.tokens:
        if mode == EndpointMode.MERGED and tok.kind == TokenKind.END_PRIMARY:
            return MicCloseResult(" ".join(kept), True, tok.emit_time)
        if mode == EndpointMode.SEPARATE and tok.text == END_OF_SPEECH:
            return MicCloseResult(" ".join(kept), True, tok.emit_time)
        if not tok.is_tag:
            kept.append(tok.text)

    return MicCloseResult(" ".join(kept))
