from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import StrEnum
from typing import ClassVar

import numpy as np

from ..errors import InvalidSpecError
from .vocabulary import FILLERS


class FailureKind(StrEnum):
    """The simulated ways a recognizer can go wrong."""

    ORACLE = "oracle"
    BURST_DELETER = "burst"
    RANDOM_ERRORS = "random"
    STUCK_AFTER_NOISE = "stuck"


@dataclass(frozen=True, slots=True)
class HypWord:
    """A hypothesis word and the reference word it was emitted alongside."""

    word: str
    anchor: int


@dataclass(frozen=True, slots=True)
class Corruption:
    """What a failure model did to a reference."""

    hyp: tuple[HypWord, ...]
    deleted: tuple[int, ...]


@dataclass(frozen=True)
class FailureModel(ABC):
    """Base class for the simulated recognizers.

    Subclasses turn a reference word sequence into a hypothesis and report exactly
    which reference words they deleted.
    """

    kind: ClassVar[FailureKind]
    seed: int = 0

    @abstractmethod
    def deleted_indices(
        self,
        n_words: int,
        noise_words: tuple[int, int],
        rng: np.random.Generator,
    ) -> list[int]:
        """Choose the reference positions to delete.

        Parameters
        ----------
        n_words : int
            Reference length
        noise_words : tuple[int, int]
            Half-open range of reference positions covered by the noise
        rng : np.random.Generator
            Per-record generator

        Returns
        -------
        list[int]
            Sorted positions to delete
        """

    def corrupt(
        self,
        ref: list[str],
        noise_words: tuple[int, int],
        rng: np.random.Generator,
    ) -> Corruption:
        """Produce the hypothesis for one reference."""
        deleted = self.deleted_indices(len(ref), noise_words, rng)
        gone = set(deleted)
        hyp = tuple(HypWord(w, i) for i, w in enumerate(ref) if i not in gone)
        return Corruption(hyp, tuple(deleted))


@dataclass(frozen=True)
class Oracle(FailureModel):
    """A perfect recognizer."""

    kind: ClassVar[FailureKind] = FailureKind.ORACLE

    def deleted_indices(
        self,
        n_words: int,  # noqa: ARG002
        noise_words: tuple[int, int],  # noqa: ARG002
        rng: np.random.Generator,  # noqa: ARG002
    ) -> list[int]:
        """Delete nothing."""
        return []


@dataclass(frozen=True)
class BurstDeleter(FailureModel):
    """Deletes `burst_len` consecutive words starting at `burst_start_word`.

    Without a start word the burst begins with the first word after the noise.
    """

    kind: ClassVar[FailureKind] = FailureKind.BURST_DELETER
    burst_start_word: int | None = None
    burst_len: int = 30

    def __post_init__(self):
        if (self.burst_start_word or 0) < 0 or self.burst_len < 1:
            raise InvalidSpecError(
                f"Bad burst: start={self.burst_start_word}, len={self.burst_len}"
            )

    def deleted_indices(
        self,
        n_words: int,
        noise_words: tuple[int, int],
        rng: np.random.Generator,  # noqa: ARG002
    ) -> list[int]:
        """Delete the burst, which must fit inside the reference."""
        start = self.burst_start_word
        if start is None:
            start = noise_words[1]
        end = start + self.burst_len
        if end > n_words:
            raise InvalidSpecError(
                f"Burst [{start}, {end}) does not fit in a "
                f"{n_words}-word reference."
            )
        return list(range(start, end))


@dataclass(frozen=True)
class StuckAfterNoise(FailureModel):
    """Transcribes through the noise, then emits nothing for a while once it ends.

    The recognizer resumes `resume_after_words` words after the end of the noise,
    or never if the reference runs out first.
    """

    kind: ClassVar[FailureKind] = FailureKind.STUCK_AFTER_NOISE
    resume_after_words: int = 30

    def __post_init__(self):
        if self.resume_after_words < 1:
            raise InvalidSpecError(
                f"resume_after_words must be >= 1; got {self.resume_after_words}"
            )

    def deleted_indices(
        self,
        n_words: int,
        noise_words: tuple[int, int],
        rng: np.random.Generator,  # noqa: ARG002
    ) -> list[int]:
        """Delete the words right after the noise."""
        _, noise_end = noise_words
        return list(range(noise_end, min(n_words, noise_end + self.resume_after_words)))


@dataclass(frozen=True)
class RandomErrors(FailureModel):
    """Independent per-word substitutions, deletions and insertions.

    Substituted and inserted words are drawn from `FILLERS`, which never occur in a
    synthetic reference.
    The probabilities apply to the draws. Substitutions next to a deleted word and
    insertions that an aligner could pair with deletions are then dropped, so the
    realised substitution and insertion rates can fall below `sub_p` and `ins_p`.
    """

    kind: ClassVar[FailureKind] = FailureKind.RANDOM_ERRORS
    sub_p: float = 0.05
    del_p: float = 0.05
    ins_p: float = 0.05

    def __post_init__(self):
        for name in ("sub_p", "del_p", "ins_p"):
            p = getattr(self, name)
            if not 0 <= p <= 1:
                raise InvalidSpecError(f"{name} must be in [0, 1]; got {p}")
        if self.sub_p + self.del_p > 1:
            raise InvalidSpecError("sub_p + del_p must not exceed 1.")

    def deleted_indices(
        self,
        n_words: int,
        noise_words: tuple[int, int],  # noqa: ARG002
        rng: np.random.Generator,
    ) -> list[int]:
        """Delete each word independently with probability `del_p`."""
        return np.flatnonzero(rng.random(n_words) < self.del_p).tolist()

    def corrupt(
        self,
        ref: list[str],
        noise_words: tuple[int, int],
        rng: np.random.Generator,
    ) -> Corruption:
        """Delete, substitute and insert words independently.

        Errors an aligner could explain more cheaply are dropped, so every deletion
        run injected here is exactly the run a scorer finds. Words next to a deleted
        word are never substituted, and insertions that could pair up with nearby
        deletions as substitutions are removed.
        """
        n = len(ref)
        deleted = np.zeros(n, dtype=bool)
        picked = self.deleted_indices(n, noise_words, rng)
        deleted[np.asarray(picked, dtype=np.intp)] = True
        draws = rng.random((n, 2))
        fillers = rng.choice(len(FILLERS), size=(n, 2))

        # Conditional on survival, substitute with probability sub_p/(1-del_p)
        keep_p = 1 - self.del_p
        sub_p = self.sub_p / keep_p if keep_p > 0 else 0.0
        next_to_deletion = np.zeros(n, dtype=bool)
        next_to_deletion[1:] |= deleted[:-1]
        next_to_deletion[:-1] |= deleted[1:]
        substituted = ~deleted & ~next_to_deletion & (draws[:, 0] < sub_p)
        inserted = _unpairable_insertions(
            deleted, substituted, draws[:, 1] < self.ins_p
        )

        hyp = []
        for i, word in enumerate(ref):
            if not deleted[i]:
                emitted = FILLERS[fillers[i, 0]] if substituted[i] else word
                hyp.append(HypWord(emitted, i))
            if inserted[i]:
                hyp.append(HypWord(FILLERS[fillers[i, 1]], i))
        return Corruption(tuple(hyp), tuple(np.flatnonzero(deleted).tolist()))


def _unpairable_insertions(
    deleted: np.ndarray, substituted: np.ndarray, inserted: np.ndarray
) -> np.ndarray:
    """Drop insertions until no alignment can trade them against deletions.

    The correctly emitted words split the reference into gaps. An aligner that
    gives up the `j` correct words inside a stretch of gaps holding `D` deletions
    and `I` insertions pays `j + max(D, I)` instead of `D + I`, so every stretch
    with both kinds of error needs `j > min(D, I)`. Stretches that break this lose
    the insertions of their first gap that has any, until none are left.
    """
    matched = (~deleted & ~substituted).astype(np.intp)
    # Word i sits in gap `before[i]`; the insertion after it in `through[i]`
    through = np.cumsum(matched)
    before = through - matched
    n_gaps = int(through[-1]) + 1
    del_cum = np.concatenate(
        ([0], np.cumsum(np.bincount(before[deleted], minlength=n_gaps)))
    )
    lo = np.arange(n_gaps)[:, None]
    hi = np.arange(n_gaps)[None, :]
    n_del = del_cum[hi + 1] - del_cum[lo]

    inserted = inserted.copy()
    while inserted.any():
        per_gap = np.bincount(through[inserted], minlength=n_gaps)
        ins_cum = np.concatenate(([0], np.cumsum(per_gap)))
        n_ins = ins_cum[hi + 1] - ins_cum[lo]
        pairable = (
            (hi >= lo)
            & (n_del > 0)
            & (n_ins > 0)
            & (hi - lo <= np.minimum(n_del, n_ins))
        )
        if not pairable.any():
            break
        first, last = np.argwhere(pairable)[0]
        gap = first + np.flatnonzero(per_gap[first : last + 1])[0]
        inserted &= through != gap
    return inserted


def make_failure_model(
    kind: FailureKind | str, seed: int = 0, **params
) -> FailureModel:
    """Build a failure model from its kind and parameters.

    Parameters
    ----------
    kind : FailureKind | str
        Which model to build
    seed : int
        Base seed for per-record generators
    **params
        Keyword arguments for the model, e.g. `burst_len` for a burst deleter

    Returns
    -------
    FailureModel
        The configured model
    """
    classes = {
        FailureKind.ORACLE: Oracle,
        FailureKind.BURST_DELETER: BurstDeleter,
        FailureKind.RANDOM_ERRORS: RandomErrors,
        FailureKind.STUCK_AFTER_NOISE: StuckAfterNoise,
    }
    try:
        cls = classes[FailureKind(kind)]
    except ValueError as e:
        raise InvalidSpecError(f"Unknown failure model {kind!r}") from e
    return cls(seed=seed, **params)
