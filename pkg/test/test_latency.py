from fractions import Fraction
from math import ceil

import numpy as np
import pytest
from rich.console import Console

from pysptags.corpus import EvalRecord, read_jsonl
from pysptags.errors import EmptyInputError, MissingTimingsError
from pysptags.metrics import (
    Domain,
    EpTally,
    TimedWord,
    UtteranceRecord,
    endpointer_table,
    ep_latency,
    ep_quantiles,
    nearest_rank,
)
from pysptags.transcript import EndpointMode, TaggedTranscript, Token

REF = (TimedWord("call", 0.0, 0.5), TimedWord("mom", 0.5, 1.0))


def _short(*tokens: Token, mic_close_time=None) -> UtteranceRecord:
    return UtteranceRecord(
        "utt",
        REF,
        TaggedTranscript(tokens),
        mic_close_time=mic_close_time,
        domain=Domain.SHORT,
    )


def test_nearest_rank_matches_exact_rank():
    """Compare percentiles with the rank computed in exact arithmetic."""
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        values = sorted(rng.random(rng.integers(1, 50)).tolist())
        for percent in (50, 90):
            rank = max(1, ceil(Fraction(percent, 100) * len(values)))
            assert nearest_rank(values, percent) == values[rank - 1]


def test_ep_quantiles():
    """Test EP50 and EP90 over ten evenly spread latencies."""
    assert ep_quantiles(range(10, 0, -1)) == (5, 9)
    assert ep_quantiles([0.4]) == (0.4, 0.4)
    with pytest.raises(EmptyInputError):
        ep_quantiles([])


def test_ep_latency_from_end_primary():
    """Test that the first `<end-primary>` closes the microphone."""
    record = _short(
        Token.word("call", 0.5),
        Token.word("mom", 1.0),
        Token.end_primary(1.25),
        Token.end_primary(3.0),
    )
    assert ep_latency(record) == pytest.approx(0.25)


def test_ep_latency_prefers_mic_close_time():
    """Test that a recorded close time wins over the stream."""
    record = _short(Token.end_primary(1.25), mic_close_time=1.5)
    assert ep_latency(record) == pytest.approx(0.5)


def test_ep_latency_early_close_is_negative():
    """Test that closing before the speech ends gives a negative latency."""
    record = _short(Token.word("call", 0.5), Token.end_primary(0.75))
    assert ep_latency(record) == pytest.approx(-0.25)


def test_ep_latency_never_closed():
    """Test that a stream without the close token has no latency."""
    record = _short(Token.word("call", 0.5), Token.end_others(1.2))
    assert ep_latency(record) is None


def test_ep_latency_separate_endpoint():
    """Test that a separate end-of-speech token closes the microphone."""
    record = _short(
        Token.word("call", 0.5),
        Token.end_primary(0.6),
        Token.word("mom", 1.0),
        Token.word("<end-of-speech>", 1.4),
    )
    assert ep_latency(record, EndpointMode.SEPARATE) == pytest.approx(0.4)
    assert ep_latency(record, EndpointMode.MERGED) == pytest.approx(-0.4)


def test_ep_latency_needs_short_record():
    """Test that latency is only defined for Short records."""
    record = UtteranceRecord("utt", REF, TaggedTranscript(), domain=Domain.CAPTION)
    with pytest.raises(ValueError, match="only defined"):
        ep_latency(record)


def test_ep_latency_untimed_close():
    """Test that a close token without an emit time is a missing timing."""
    record = _short(Token.word("call", 0.4), Token.end_primary())
    with pytest.raises(MissingTimingsError, match="without an emit time"):
        ep_latency(record)
    assert ep_latency(_short(Token.word("call", 0.4))) is None


def test_ep_latency_needs_end_time():
    """Test that the last reference word must carry an end time."""
    record = UtteranceRecord(
        "utt",
        (TimedWord("call", 0.0, 0.5), TimedWord("mom")),
        TaggedTranscript((Token.end_primary(1.0),)),
        domain=Domain.SHORT,
    )
    with pytest.raises(MissingTimingsError):
        ep_latency(record)


def test_ep_tally():
    """Test the EP50 and EP90 columns, in milliseconds."""
    tally = EpTally()
    for latency in [0.9, 0.1, 0.2, 0.22, 0.24, 0.26, 0.3, 0.5, 0.7, 0.83]:
        tally.add(latency)
    tally.add(None)
    body = tally.to_dict()

    assert (body["ep50_ms"], body["ep90_ms"]) == (260, 830)
    assert (body["records"], body["closed"], body["unclosed"]) == (11, 10, 1)

    console = Console(width=120, record=True)
    console.print(endpointer_table({"merged": tally}))
    text = console.export_text()
    assert "260" in text
    assert "830" in text


def test_ep_sample_corpus(sample_ep):
    """Test the quantiles of the sample corpus, skipping its caption record."""
    records = [r.utterance for r in read_jsonl(sample_ep, EvalRecord.from_dict)]
    short = [r for r in records if r.domain == Domain.SHORT]

    assert len(records) == 11
    assert len(short) == 10
    p50, p90 = ep_quantiles(ep_latency(r) for r in short)
    assert round(p50 * 1000) == 500
    assert round(p90 * 1000) == 900
    np.testing.assert_allclose(
        [ep_latency(r) for r in short], np.arange(1, 11) / 10, atol=1e-9
    )
