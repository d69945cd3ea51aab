import logging
import os
from collections.abc import Mapping
from dataclasses import asdict, dataclass, field, fields, replace
from enum import StrEnum
from os import PathLike
from pathlib import Path
from typing import ClassVar, Self

import tomli
import tomli_w

from ..corpus.jsonl import create_parents_or_fail
from ..metrics.longform import DEFAULT_THRESHOLD, Domain
from ..relabel import RelabelOptions
from ..synth import FailureKind, FailureModel, SynthSpec, make_failure_model
from ..transcript import EndpointMode, ViewKind

logger = logging.getLogger(__name__)

WORKERS_ENV = "PYSPTAGS_WORKERS"


class CorpusKind(StrEnum):
    """Which kind of synthetic corpus to generate."""

    EVAL = "eval"
    RELABEL = "relabel"


@dataclass
class RelabelSettings:
    """Settings for relabeling paired transcripts."""

    edit_budget: int = 1
    enumeration_cap: int = 10_000
    segmented: bool = False

    def options(self) -> RelabelOptions:
        """Get the relabeler options these settings describe."""
        return RelabelOptions(self.edit_budget, self.enumeration_cap, self.segmented)


@dataclass
class LongformSettings:
    """Settings for the scoring subcommands."""

    threshold: int = DEFAULT_THRESHOLD
    view: ViewKind = ViewKind.ALL_SPEECH
    endpoint: EndpointMode = EndpointMode.MERGED

    def __post_init__(self):
        self.view = ViewKind(self.view)
        self.endpoint = EndpointMode(self.endpoint)
        if self.threshold < 1:
            raise ValueError(f"threshold must be >= 1; got {self.threshold}")


@dataclass
class SynthSettings:
    """Settings for synthetic corpora and the failure model used to corrupt them."""

    kind: CorpusKind = CorpusKind.EVAL
    model: FailureKind = FailureKind.ORACLE
    seed: int = 0
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
    burst_start_word: int | None = None
    burst_len: int = 30
    resume_after_words: int = 30
    sub_p: float = 0.05
    del_p: float = 0.05
    ins_p: float = 0.05

    def __post_init__(self):
        self.kind = CorpusKind(self.kind)
        self.model = FailureKind(self.model)
        self.domain = Domain(self.domain)
        self.latency_range = tuple(self.latency_range)

    def spec(self) -> SynthSpec:
        """Get the corpus shape these settings describe."""
        names = {f.name for f in fields(SynthSpec)}
        return SynthSpec(**{k: v for k, v in asdict(self).items() if k in names})

    def failure_model(self) -> FailureModel:
        """Build the configured failure model."""
        params = {
            FailureKind.ORACLE: {},
            FailureKind.BURST_DELETER: {
                "burst_start_word": self.burst_start_word,
                "burst_len": self.burst_len,
            },
            FailureKind.STUCK_AFTER_NOISE: {
                "resume_after_words": self.resume_after_words
            },
            FailureKind.RANDOM_ERRORS: {
                "sub_p": self.sub_p,
                "del_p": self.del_p,
                "ins_p": self.ins_p,
            },
        }
        return make_failure_model(self.model, self.seed, **params[self.model])


@dataclass
class RunnerSettings:
    """Settings for how records are read and processed."""

    workers: int = 1
    window: int = 256
    strict: bool = True

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1; got {self.workers}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1; got {self.window}")


def workers_from_env(environ: Mapping[str, str] | None = None) -> int | None:
    """Read the default number of workers from the environment.

    Raises
    ------
    ValueError
        If the variable is set to anything but a positive integer
    """
    environ = os.environ if environ is None else environ
    raw = environ.get(WORKERS_ENV)
    if raw is None or not raw.strip():
        return None
    try:
        workers = int(raw)
    except ValueError:
        workers = 0
    if workers < 1:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer; got {raw!r}")
    return workers


@dataclass
class Config:
    """A container that holds all the settings for a pysptags run."""

    relabel: RelabelSettings = field(default_factory=RelabelSettings)
    longform: LongformSettings = field(default_factory=LongformSettings)
    synth: SynthSettings = field(default_factory=SynthSettings)
    runner: RunnerSettings = field(default_factory=RunnerSettings)

    _sections: ClassVar[tuple[str, ...]] = ("relabel", "longform", "synth", "runner")

    @classmethod
    def from_settings(cls, settings: PathLike | str) -> Self:
        """Generate a Config from a settings.toml file.

        Each table in the file (`[relabel]`, `[longform]`, `[synth]`, `[runner]`)
        overrides the defaults of the matching settings group.

        Parameters
        ----------
        settings : PathLike | str
            Path to a settings.toml file

        Returns
        -------
        Self
            A Config instance with the file's values over the defaults

        Raises
        ------
        ValueError
            If the file has a section or key pysptags does not know
        """
        with open(settings, mode="rb") as f:
            data = tomli.load(f)

        config = cls()
        for section, values in data.items():
            if section not in cls._sections or not isinstance(values, dict):
                raise ValueError(f"{settings}: unknown settings section [{section}]")

            current = getattr(config, section)
            known = {f.name for f in fields(current)}
            unknown = sorted(set(values) - known)
            if unknown:
                raise ValueError(
                    f"{settings}: unknown keys in [{section}]: {', '.join(unknown)}"
                )
            setattr(config, section, replace(current, **values))

        logger.debug("Loaded settings from %s", settings)
        return config

    @classmethod
    def load(
        cls,
        settings: PathLike | str | None = None,
        environ: Mapping[str, str] | None = None,
    ) -> Self:
        """Build the effective configuration from defaults, a file and the environment.

        Command line flags are applied on top of this by the CLI.

        Parameters
        ----------
        settings : PathLike | str | None
            Optional settings.toml file
        environ : Mapping[str, str] | None
            Environment to read `PYSPTAGS_WORKERS` from; defaults to `os.environ`

        Returns
        -------
        Self
            The effective configuration
        """
        config = cls.from_settings(settings) if settings is not None else cls()
        workers = workers_from_env(environ)
        if workers is not None:
            config.runner = replace(config.runner, workers=workers)
        return config

    def to_file(
        self,
        filename: PathLike | str = "settings.toml",
        overwrite: bool = False,
        create_parents: bool = True,
    ):
        """Write the configuration to a settings.toml file.

        Parameters
        ----------
        filename : PathLike | str
            Path where the settings should be written
        overwrite : bool
            If True, overwrite an existing file
        create_parents : bool
            If True, create any necessary parent directories
        """
        path = Path(filename)
        create_parents_or_fail(path, overwrite, create_parents)

        # TOML has no null, so unset values are left out
        data = {
            section: {
                key: value.value if isinstance(value, StrEnum) else value
                for key, value in asdict(getattr(self, section)).items()
                if value is not None
            }
            for section in self._sections
        }
        with open(path, "wb") as f:
            tomli_w.dump(data, f)
