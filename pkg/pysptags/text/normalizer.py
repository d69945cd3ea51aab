from collections.abc import Iterable
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class NormalizedWord:
    """A surface token paired with its case- and punctuation-free form."""

    surface: str
    norm: str

    @property
    def is_empty(self) -> bool:
        """Whether nothing was left after normalization (pure punctuation)."""
        return not self.norm


def normalize_word(raw: str) -> NormalizedWord:
    """Normalize a single token for matching.

    The token is case folded and every character that is not a letter or digit is
    dropped, so `Eiffel-tower` becomes `eiffeltower` and `?` becomes the empty
    string. The surface form is kept verbatim.

    Parameters
    ----------
    raw : str
        A single whitespace-free token

    Returns
    -------
    NormalizedWord
        The surface form and its normalized form
    """
    return NormalizedWord(raw, "".join(ch for ch in raw.casefold() if ch.isalnum()))


def normalize_seq(words: Iterable[str]) -> list[NormalizedWord]:
    """Normalize each token of a sequence.

    Tokens are never split or merged, so positions in the result line up with
    positions in the input. Tokens that normalize to nothing are kept and flagged
    through `NormalizedWord.is_empty`.
    """
    return [normalize_word(w) for w in words]
