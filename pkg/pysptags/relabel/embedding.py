from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum
from typing import Self

from ..errors import EnumerationCapExceeded
from ..text import NormalizedWord


@dataclass(frozen=True, slots=True)
class RelabelOptions:
    """Knobs for the relabeling heuristic.

    Parameters
    ----------
    edit_budget : int
        How many one-word differences an embedding may use
    enumeration_cap : int
        How many embeddings to enumerate before giving up as ambiguous
    segmented : bool
        Whether the utterance is a chunk of longer audio, in which case the final
        tag is removed
    """

    edit_budget: int = 1
    enumeration_cap: int = 10_000
    segmented: bool = False

    def __post_init__(self):
        if self.edit_budget < 0:
            raise ValueError(f"edit_budget must be >= 0; got {self.edit_budget}")
        if self.enumeration_cap < 1:
            raise ValueError(
                f"enumeration_cap must be >= 1; got {self.enumeration_cap}"
            )


class EditKind(StrEnum):
    """The kinds of one-word difference tolerated while embedding."""

    SUBSTITUTE = "substitute"
    SKIP_P = "skip_p"
    ABSORB_A = "absorb_a"


@dataclass(frozen=True, slots=True, order=True)
class Edit:
    """A single tolerated difference between the primary and all-speech transcripts.

    `SUBSTITUTE` pairs a primary word with a different all-speech word, `SKIP_P`
    leaves a primary word unmatched, and `ABSORB_A` pulls an unmatched all-speech
    word into the primary run that surrounds it. Indices refer to positions in the
    original (unfiltered) token sequences.
    """

    kind: EditKind
    p_index: int | None = None
    a_index: int | None = None

    def __post_init__(self):
        needs_p = self.kind in (EditKind.SUBSTITUTE, EditKind.SKIP_P)
        needs_a = self.kind in (EditKind.SUBSTITUTE, EditKind.ABSORB_A)
        if needs_p != (self.p_index is not None) or needs_a != (
            self.a_index is not None
        ):
            raise ValueError(
                f"Bad indices for a {self.kind} edit: p_index={self.p_index}, "
                f"a_index={self.a_index}"
            )

    @classmethod
    def substitute(cls, p_index: int, a_index: int) -> Self:
        """Match primary word `p_index` to a different word at `a_index`."""
        return cls(EditKind.SUBSTITUTE, p_index, a_index)

    @classmethod
    def skip_p(cls, p_index: int) -> Self:
        """Leave primary word `p_index` unmatched."""
        return cls(EditKind.SKIP_P, p_index=p_index)

    @classmethod
    def absorb_a(cls, a_index: int) -> Self:
        """Treat the unmatched word at `a_index` as primary speech."""
        return cls(EditKind.ABSORB_A, a_index=a_index)


@dataclass(frozen=True, slots=True)
class Embedding:
    """A placement of the primary transcript inside the all-speech transcript.

    `indices` holds one all-speech position per matched (or substituted) primary
    word, strictly increasing.
    """

    indices: tuple[int, ...]
    edits: tuple[Edit, ...] = ()

    def __post_init__(self):
        if any(a >= b for a, b in zip(self.indices, self.indices[1:], strict=False)):
            raise ValueError(f"Indices must be strictly increasing: {self.indices}")

    @property
    def cost(self) -> int:
        """The number of edits used."""
        return len(self.edits)

    @property
    def absorbed(self) -> tuple[int, ...]:
        """All-speech positions pulled into a primary run."""
        return tuple(e.a_index for e in self.edits if e.kind == EditKind.ABSORB_A)

    @property
    def skipped(self) -> tuple[int, ...]:
        """Primary positions left unmatched."""
        return tuple(e.p_index for e in self.edits if e.kind == EditKind.SKIP_P)

    @property
    def primary_positions(self) -> frozenset[int]:
        """Every all-speech position that belongs to the primary speaker."""
        return frozenset(self.indices) | frozenset(self.absorbed)


def _matchable(words: Sequence[NormalizedWord]) -> tuple[list[int], list[str]]:
    positions = [i for i, w in enumerate(words) if not w.is_empty]
    return positions, [words[i].norm for i in positions]


def _cost_table(p: list[str], a: list[str]) -> list[list[int]]:
    """Tabulate the fewest edits needed to embed every suffix of `p` into `a`.

    `table[i][j]` is the cheapest way to place `p[i:]` inside `a[j:]` using
    substitutions and skips. Absorbing only ever adds cost, so it is left out; the
    table is a lower bound used to prune the enumeration.
    """
    n, m = len(p), len(a)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        table[i][m] = n - i
        for j in range(m - 1, -1, -1):
            table[i][j] = min(
                table[i][j + 1],
                1 + table[i + 1][j],
                (p[i] != a[j]) + table[i + 1][j + 1],
            )
    return table


def min_edits(P: Sequence[NormalizedWord], A: Sequence[NormalizedWord]) -> int:
    """Get the fewest edits with which `P` embeds into `A`.

    Parameters
    ----------
    P : Sequence[NormalizedWord]
        Normalized primary-speaker transcript
    A : Sequence[NormalizedWord]
        Normalized all-speech transcript

    Returns
    -------
    int
        Zero when `P` is a subsequence of `A` (ignoring empty tokens)
    """
    _, p = _matchable(P)
    _, a = _matchable(A)
    return _cost_table(p, a)[0][0]


def find_embeddings(
    P: Sequence[NormalizedWord],
    A: Sequence[NormalizedWord],
    opts: RelabelOptions | None = None,
) -> list[Embedding]:
    """Enumerate every embedding of `P` into `A` within an edit budget.

    A suffix cost table is built first, then a depth-first search walks only the
    branches that can still finish within the remaining budget. Tokens that
    normalize to nothing are never matched.

    Parameters
    ----------
    P : Sequence[NormalizedWord]
        Normalized primary-speaker transcript
    A : Sequence[NormalizedWord]
        Normalized all-speech transcript
    opts : RelabelOptions | None
        Edit budget and enumeration cap; defaults to `RelabelOptions()`

    Returns
    -------
    list[Embedding]
        All embeddings within `opts.edit_budget` edits, in a deterministic order

    Raises
    ------
    EnumerationCapExceeded
        If more than `opts.enumeration_cap` embeddings exist. The first
        `opts.enumeration_cap` of them are attached to the exception.
    """
    opts = opts or RelabelOptions()
    edit_budget, enumeration_cap = opts.edit_budget, opts.enumeration_cap
    p_pos, p = _matchable(P)
    a_pos, a = _matchable(A)
    n, m = len(p), len(a)
    table = _cost_table(p, a)
    if table[0][0] > edit_budget:
        return []

    found: list[Embedding] = []
    # (next primary word, next all-speech word, last matched all-speech word,
    #  remaining budget, matched positions, edits)
    stack = [(0, 0, None, edit_budget, (), ())]
    while stack:
        i, j, last, remaining, indices, edits = stack.pop()
        if i == n:
            found.append(Embedding(indices, tuple(sorted(edits))))
            if len(found) > enumeration_cap:
                raise EnumerationCapExceeded(enumeration_cap, found[:enumeration_cap])
            continue

        branches = []
        if remaining >= 1 + table[i + 1][j]:
            skip = Edit.skip_p(p_pos[i])
            branches.append((i + 1, j, last, remaining - 1, indices, (*edits, skip)))

        for k in range(j, m):
            sub = int(p[i] != a[k])
            rest = remaining - sub - table[i + 1][k + 1]
            if rest < 0:
                continue

            step = (Edit.substitute(p_pos[i], a_pos[k]),) if sub else ()
            matched = (*indices, a_pos[k])
            branches.append(
                (i + 1, k + 1, k, remaining - sub, matched, (*edits, *step))
            )

            # Absorbing is only possible for a gap strictly inside a primary run
            gap = k - j
            if last is not None and 0 < gap <= rest:
                absorbed = tuple(Edit.absorb_a(a_pos[g]) for g in range(j, k))
                branches.append(
                    (
                        i + 1,
                        k + 1,
                        k,
                        remaining - sub - gap,
                        matched,
                        (*edits, *absorbed, *step),
                    )
                )

        stack.extend(reversed(branches))

    return found
