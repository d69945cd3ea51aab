from collections.abc import Callable
from pathlib import Path

import pytest

from pysptags.metrics import TimedWord
from pysptags.text import NormalizedWord, normalize_seq


@pytest.fixture
def sample_data() -> Path:
    """Get the path to the sample data."""
    return Path(__file__).parent / "sample_data"


@pytest.fixture
def sample_relabel(sample_data) -> Path:
    """Get the path to relabel pairs including the worked examples."""
    return sample_data / "relabel.jsonl"


@pytest.fixture
def sample_malformed(sample_data) -> Path:
    """Get the path to a relabel file whose second line is broken."""
    return sample_data / "malformed.jsonl"


@pytest.fixture
def sample_empty(sample_data) -> Path:
    """Get the path to an empty corpus file."""
    return sample_data / "empty.jsonl"


@pytest.fixture
def sample_ep(sample_data) -> Path:
    """Get the path to ten Short records with latencies 0.1 s to 1.0 s.

    A caption record is mixed in, which the endpointer metrics must ignore.
    """
    return sample_data / "ep.jsonl"


@pytest.fixture
def sample_settings(sample_data) -> Path:
    """Get the path to an example settings.toml file."""
    return sample_data / "settings.toml"


@pytest.fixture
def words() -> Callable[[str], list[NormalizedWord]]:
    """Get a function that normalizes a space separated string."""

    def _words(text: str) -> list[NormalizedWord]:
        return normalize_seq(text.split())

    return _words


@pytest.fixture
def timed() -> Callable[..., tuple[TimedWord, ...]]:
    """Get a function making `n` distinct words, word i spanning [i*d, (i+1)*d]."""

    def _timed(n: int, duration: float = 1.0) -> tuple[TimedWord, ...]:
        return tuple(
            TimedWord(f"w{i}", i * duration, (i + 1) * duration) for i in range(n)
        )

    return _timed
