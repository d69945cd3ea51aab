from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Self

END_PRIMARY = "<end-primary>"
END_OTHERS = "<end-others>"


class TokenKind(StrEnum):
    """The three kinds of token that can appear in a tagged transcript."""

    WORD = "word"
    END_PRIMARY = END_PRIMARY
    END_OTHERS = END_OTHERS


class Speaker(StrEnum):
    """Which speaker group a run of words belongs to."""

    PRIMARY = "primary"
    OTHERS = "others"
    UNTAGGED = "untagged"


@dataclass(frozen=True, slots=True)
class Token:
    """A word or a speaker-tag, optionally stamped with the time it was emitted."""

    kind: TokenKind
    text: str | None = None
    emit_time: float | None = None

    def __post_init__(self):
        if self.kind == TokenKind.WORD:
            if not self.text or any(ch.isspace() for ch in self.text):
                raise ValueError(
                    f"Word tokens need non-empty text without whitespace; got "
                    f"{self.text!r}"
                )
        elif self.text is not None:
            raise ValueError(f"{self.kind} tokens carry no text; got {self.text!r}")

        if self.emit_time is not None and self.emit_time < 0:
            raise ValueError(f"Emit times must be >= 0; got {self.emit_time}")

    @classmethod
    def word(cls, text: str, emit_time: float | None = None) -> Self:
        """Make a word token."""
        return cls(TokenKind.WORD, text, emit_time)

    @classmethod
    def end_primary(cls, emit_time: float | None = None) -> Self:
        """Make an `<end-primary>` token."""
        return cls(TokenKind.END_PRIMARY, None, emit_time)

    @classmethod
    def end_others(cls, emit_time: float | None = None) -> Self:
        """Make an `<end-others>` token."""
        return cls(TokenKind.END_OTHERS, None, emit_time)

    @classmethod
    def from_literal(cls, literal: str, emit_time: float | None = None) -> Self:
        """Make a token from its plain-text form.

        Only the two exact tag literals become tags; anything else, including other
        angle-bracket tokens such as `<end-of-speech>`, is a word.
        """
        if literal == END_PRIMARY:
            return cls.end_primary(emit_time)
        if literal == END_OTHERS:
            return cls.end_others(emit_time)
        return cls.word(literal, emit_time)

    @property
    def is_tag(self) -> bool:
        """Whether this token is one of the speaker-tags."""
        return self.kind != TokenKind.WORD

    @property
    def literal(self) -> str:
        """The plain-text form of this token."""
        return self.text if self.kind == TokenKind.WORD else str(self.kind)


@dataclass(frozen=True, slots=True)
class Segment:
    """A run of words closed by a single tag (or by the end of the transcript)."""

    speaker: Speaker
    words: tuple[Token, ...]
    tag: Token | None = field(default=None, compare=False)

    @property
    def text(self) -> str:
        """The words of the segment joined by single spaces."""
        return " ".join(w.text for w in self.words)


@dataclass(frozen=True, slots=True)
class TaggedTranscript:
    """An ordered sequence of word and speaker-tag tokens."""

    tokens: tuple[Token, ...] = ()

    @classmethod
    def from_tokens(cls, tokens: Iterable[Token]) -> Self:
        """Build a transcript from any iterable of tokens."""
        return cls(tuple(tokens))

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __str__(self) -> str:
        return render_tagged(self)

    @property
    def words(self) -> tuple[Token, ...]:
        """The word tokens, in order, with all tags removed."""
        return tuple(tok for tok in self.tokens if not tok.is_tag)

    @property
    def tag_count(self) -> int:
        """The number of speaker-tag tokens."""
        return sum(tok.is_tag for tok in self.tokens)


def parse_tagged(text: str) -> TaggedTranscript:
    """Parse the plain-text form of a tagged transcript.

    Parameters
    ----------
    text : str
        Whitespace separated tokens; `<end-primary>` and `<end-others>` become tags

    Returns
    -------
    TaggedTranscript
        The parsed transcript. Leading or repeated tags are kept as they are; use
        `canonicalize_tags` to clean up decoder output.
    """
    return TaggedTranscript(tuple(Token.from_literal(lit) for lit in text.split()))


def render_tagged(transcript: TaggedTranscript) -> str:
    """Render a transcript in its plain-text form.

    Emit times are not part of the plain-text form.
    """
    return " ".join(tok.literal for tok in transcript.tokens)


def segments(transcript: TaggedTranscript) -> list[Segment]:
    """Split a transcript into the runs of words closed by each tag.

    Every tag closes one segment, even an empty one, so that back-to-back tags are
    still visible to `canonicalize_tags`. Words after the last tag form a final
    `Speaker.UNTAGGED` segment.

    Parameters
    ----------
    transcript : TaggedTranscript
        Transcript to split

    Returns
    -------
    list[Segment]
        One segment per tag, plus one for a trailing untagged run
    """
    result = []
    run: list[Token] = []
    for tok in transcript.tokens:
        if tok.kind == TokenKind.WORD:
            run.append(tok)
            continue

        if tok.kind == TokenKind.END_PRIMARY:
            speaker = Speaker.PRIMARY
        else:
            speaker = Speaker.OTHERS
        result.append(Segment(speaker, tuple(run), tok))
        run = []

    if run:
        result.append(Segment(Speaker.UNTAGGED, tuple(run)))
    return result


def tag_for(speaker: Speaker, emit_time: float | None = None) -> Token:
    """Get the tag token that closes a segment spoken by `speaker`."""
    if speaker == Speaker.PRIMARY:
        return Token.end_primary(emit_time)
    if speaker == Speaker.OTHERS:
        return Token.end_others(emit_time)
    raise ValueError("Untagged segments are not closed by a tag.")
