from abc import ABC, abstractmethod
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any, Self

from ..metrics.longform import (
    DeletionRun,
    Domain,
    NoiseWindow,
    TimedWord,
    UtteranceRecord,
)
from ..relabel import RelabelStatus
from ..synth import GroundTruth, RelabelPair
from ..transcript import TaggedTranscript, Token


class BaseRecord(ABC):
    """Base class for all corpus line types."""

    @classmethod
    @abstractmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Self:
        """Parse one decoded JSON line.

        Parameters
        ----------
        data : Mapping[str, Any]
            The decoded object

        Returns
        -------
        Self
            The record

        Raises
        ------
        KeyError, TypeError, ValueError
            If the object is not a valid record of this type
        """

    @abstractmethod
    def to_dict(self) -> dict[str, Any]:
        """Get the JSON-ready form of the record."""


def _require_str(data: Mapping[str, Any], key: str, allow_empty: bool = True) -> str:
    value = data[key]
    if not isinstance(value, str):
        raise TypeError(f"{key!r} must be a string; got {type(value).__name__}")
    if not allow_empty and not value:
        raise ValueError(f"{key!r} must not be empty")
    return value


def _optional_float(data: Mapping[str, Any], key: str) -> float | None:
    value = data.get(key)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise TypeError(f"{key!r} must be a number; got {value!r}")
    return float(value)


@dataclass(frozen=True, slots=True)
class RelabelRecord(BaseRecord):
    """A pair of transcripts to relabel, with its expected outcome if known."""

    id: str
    trans_primary: str
    trans_all: str
    original_truth: str
    segmented: bool = False
    domain: Domain | None = None
    expected_status: RelabelStatus | None = None
    expected_transcript: str | None = None

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Self:
        """Parse a relabel input line."""
        segmented = data.get("segmented", False)
        if not isinstance(segmented, bool):
            raise TypeError(f"'segmented' must be a boolean; got {segmented!r}")
        domain = data.get("domain")
        status = data.get("expected_status")
        return cls(
            id=_require_str(data, "id", allow_empty=False),
            trans_primary=_require_str(data, "trans_primary"),
            trans_all=_require_str(data, "trans_all"),
            original_truth=_require_str(data, "original_truth"),
            segmented=segmented,
            domain=Domain(domain) if domain is not None else None,
            expected_status=RelabelStatus(status) if status is not None else None,
            expected_transcript=data.get("expected_transcript"),
        )

    @classmethod
    def from_pair(cls, pair: RelabelPair) -> Self:
        """Make the input line for a synthetic relabel pair."""
        return cls(
            id=pair.id,
            trans_primary=pair.trans_primary,
            trans_all=pair.trans_all,
            original_truth=pair.original_truth,
            segmented=pair.segmented,
            domain=pair.domain,
            expected_status=pair.expected_status,
            expected_transcript=pair.expected_transcript,
        )

    def to_dict(self) -> dict[str, Any]:
        """Serialize the record, leaving out unset optional fields."""
        data = {
            "id": self.id,
            "trans_primary": self.trans_primary,
            "trans_all": self.trans_all,
            "original_truth": self.original_truth,
            "segmented": self.segmented,
            "domain": self.domain,
            "expected_status": self.expected_status,
            "expected_transcript": self.expected_transcript,
        }
        return {k: v for k, v in data.items() if v is not None}


def _tokens_from_json(items: Any) -> TaggedTranscript:
    if isinstance(items, str):
        return TaggedTranscript(tuple(Token.from_literal(t) for t in items.split()))
    if not isinstance(items, list):
        raise TypeError("'hyp' must be a list of tokens or a string")
    return TaggedTranscript(
        tuple(
            Token.from_literal(
                _require_str(item, "token"), _optional_float(item, "emit_time")
            )
            for item in items
        )
    )


def _runs_to_json(truth: GroundTruth) -> dict[str, Any]:
    return {
        "noise_end": truth.noise_end,
        "runs": [
            {
                "first_ref_index": run.first_ref_index,
                "last_ref_index": run.last_ref_index,
                "first_word_start": run.first_word_start,
            }
            for run in truth.runs
        ],
    }


def _runs_from_json(record_id: str, data: Mapping[str, Any]) -> GroundTruth:
    runs = tuple(
        DeletionRun(
            int(run["first_ref_index"]),
            int(run["last_ref_index"]),
            _optional_float(run, "first_word_start"),
        )
        for run in data["runs"]
    )
    return GroundTruth(record_id, runs, _optional_float(data, "noise_end"))


@dataclass(frozen=True, slots=True)
class EvalRecord(BaseRecord):
    """A timed reference and a hypothesis stream, with injected runs if synthetic."""

    utterance: UtteranceRecord
    ground_truth: GroundTruth | None = None

    @property
    def id(self) -> str:
        """The utterance id."""
        return self.utterance.id

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Self:
        """Parse an eval input line.

        `ref` is a list of `{word, start, end}` objects (times optional) and `hyp`
        is either a list of `{token, emit_time}` objects or a plain tagged string.
        """
        record_id = _require_str(data, "id", allow_empty=False)
        ref = data["ref"]
        if not isinstance(ref, list):
            raise TypeError("'ref' must be a list of words")
        if not ref:
            raise ValueError("'ref' must not be empty")
        words = tuple(
            TimedWord(
                _require_str(w, "word", allow_empty=False),
                _optional_float(w, "start"),
                _optional_float(w, "end"),
            )
            for w in ref
        )
        noise = data.get("noise")
        utterance = UtteranceRecord(
            id=record_id,
            ref=words,
            hyp=_tokens_from_json(data["hyp"]),
            noise=NoiseWindow(float(noise["start"]), float(noise["end"]))
            if noise is not None
            else None,
            mic_close_time=_optional_float(data, "mic_close_time"),
            domain=Domain(data.get("domain", Domain.CAPTION)),
        )
        truth = data.get("ground_truth")
        return cls(
            utterance, _runs_from_json(record_id, truth) if truth is not None else None
        )

    def to_dict(self) -> dict[str, Any]:
        """Serialize the record; untimed fields are left out."""
        u = self.utterance
        ref = []
        for w in u.ref:
            item = {"word": w.word, "start": w.start, "end": w.end}
            ref.append({k: v for k, v in item.items() if v is not None})
        hyp = []
        for tok in u.hyp:
            item = {"token": tok.literal}
            if tok.emit_time is not None:
                item["emit_time"] = tok.emit_time
            hyp.append(item)

        data = {"id": u.id, "ref": ref, "hyp": hyp, "domain": u.domain}
        if u.noise is not None:
            data["noise"] = {"start": u.noise.start, "end": u.noise.end}
        if u.mic_close_time is not None:
            data["mic_close_time"] = u.mic_close_time
        if self.ground_truth is not None:
            data["ground_truth"] = _runs_to_json(self.ground_truth)
        return data


def _words(data: Mapping[str, Any], key: str) -> list[str]:
    value = data[key]
    if isinstance(value, str):
        return value.split()
    if isinstance(value, list) and all(isinstance(w, str) for w in value):
        return [w for item in value for w in item.split()]
    raise TypeError(f"{key!r} must be a string or a list of strings")


@dataclass(frozen=True, slots=True)
class ScoreRecord(BaseRecord):
    """An untimed reference and hypothesis pair."""

    id: str
    ref: tuple[str, ...]
    hyp: tuple[str, ...]

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Self:
        """Parse a score input line; `ref` and `hyp` are strings or word lists."""
        ref = tuple(_words(data, "ref"))
        if not ref:
            raise ValueError("'ref' must not be empty")
        return cls(
            id=_require_str(data, "id", allow_empty=False),
            ref=ref,
            hyp=tuple(_words(data, "hyp")),
        )

    def to_dict(self) -> dict[str, Any]:
        """Serialize the pair as plain strings."""
        return {"id": self.id, "ref": " ".join(self.ref), "hyp": " ".join(self.hyp)}


@dataclass(frozen=True, slots=True)
class TaggedRecord(BaseRecord):
    """A tagged transcript, such as a relabel result or decoder output.

    The untagged transcripts that came with it are kept so views can be scored.
    """

    id: str
    transcript: str
    trans_primary: str | None = None
    trans_all: str | None = None

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Self:
        """Parse a line with an `id` and a tagged `transcript`."""
        return cls(
            id=_require_str(data, "id", allow_empty=False),
            transcript=_require_str(data, "transcript"),
            trans_primary=data.get("trans_primary"),
            trans_all=data.get("trans_all"),
        )

    def to_dict(self) -> dict[str, Any]:
        """Serialize the record, leaving out unset optional fields."""
        data = {
            "id": self.id,
            "transcript": self.transcript,
            "trans_primary": self.trans_primary,
            "trans_all": self.trans_all,
        }
        return {k: v for k, v in data.items() if v is not None}
