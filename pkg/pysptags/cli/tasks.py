"""Per-record work for the subcommands.

Everything here is a module level function so it can be shipped to worker
processes with `functools.partial`.
"""

from dataclasses import replace
from typing import Any

from ..corpus import EvalRecord, RelabelRecord, ScoreRecord, TaggedRecord
from ..metrics import (
    LongformReport,
    WerReport,
    align,
    deletion_runs,
    ep_latency,
    longform_count,
    to_ms,
    wer_report,
)
from ..metrics.longform import Domain
from ..relabel import RelabelOptions, RelabelOutcome, relabel
from ..synth import FailureModel, SynthSpec, generate_record
from ..transcript import EndpointMode, ViewKind, endpoint_truncate, parse_tagged, view


def relabel_record(
    opts: RelabelOptions, record: RelabelRecord
) -> tuple[dict[str, Any], RelabelOutcome]:
    """Relabel one input line, passing its fields through to the output."""
    if record.segmented and not opts.segmented:
        opts = replace(opts, segmented=True)
    outcome = relabel(
        record.trans_primary, record.trans_all, record.original_truth, opts
    )
    out = record.to_dict()
    out.update(
        status=outcome.status,
        transcript=outcome.text,
        match_count=outcome.match_count,
        edits=outcome.edits,
    )
    return out, outcome


def view_record(kind: ViewKind, record: TaggedRecord) -> dict[str, Any]:
    """Render one tagged transcript for a domain, with the matching reference."""
    out = {"id": record.id, "hyp": view(parse_tagged(record.transcript), kind)}
    ref = record.trans_primary if kind == ViewKind.PRIMARY_ONLY else record.trans_all
    if ref is not None:
        out["ref"] = ref
    return out


def _runs_json(report: LongformReport) -> list[dict[str, Any]]:
    return [
        {
            "first_ref_index": run.first_ref_index,
            "length": run.length,
            "first_word_start": run.first_word_start,
        }
        for run in report.runs
        if run.length >= report.threshold
    ]


def score_record(
    threshold: int, kind: ViewKind, record: ScoreRecord
) -> tuple[dict[str, Any], LongformReport]:
    """Score an untimed pair; with no noise window every long run counts."""
    hyp = view(parse_tagged(" ".join(record.hyp)), kind).split()
    alignment = align(record.ref, hyp)
    runs = deletion_runs(alignment)
    report = LongformReport(
        wer_report(alignment),
        sum(run.length >= threshold for run in runs),
        tuple(runs),
        threshold,
    )
    out = {
        "id": record.id,
        "wer": report.wer_report.to_dict(),
        "run_count": report.run_count,
        "runs": _runs_json(report),
    }
    return out, report


def longform_record(
    threshold: int, primary_view: bool, record: EvalRecord
) -> tuple[dict[str, Any], LongformReport, int | None]:
    """Count the qualifying deletion runs in one eval record.

    Returns
    -------
    tuple[dict[str, Any], LongformReport, int | None]
        The output line, the report and the injected run count if the record
        carries ground truth
    """
    report = longform_count(record.utterance, threshold, primary_view)
    out = {
        "id": record.id,
        "wer": report.wer_report.to_dict(),
        "run_count": report.run_count,
        "runs": _runs_json(report),
    }
    expected = None
    if record.ground_truth is not None:
        expected = record.ground_truth.expected_count(threshold)
        out["expected_run_count"] = expected
    return out, report, expected


def ep_record(
    mode: EndpointMode, record: EvalRecord
) -> tuple[dict[str, Any], float | None, WerReport | None] | None:
    """Measure endpointer latency and endpointed WER for one Short record.

    Returns None for records from other domains.
    """
    u = record.utterance
    if u.domain != Domain.SHORT:
        return None

    latency = ep_latency(u, mode)
    heard = endpoint_truncate(u.hyp, mode).text.split()
    wer = wer_report(align(u.ref_words, heard)) if u.ref else None
    out = {
        "id": record.id,
        "closed": latency is not None,
        "latency_ms": to_ms(latency) if latency is not None else None,
        "wer": wer.to_dict() if wer else None,
    }
    return out, latency, wer


def synth_record(
    spec: SynthSpec, model: FailureModel, threshold: int, index: int
) -> tuple[dict[str, Any], int]:
    """Generate one eval line, and the number of qualifying runs injected into it."""
    record, truth = generate_record(spec, model, index)
    return EvalRecord(record, truth).to_dict(), truth.expected_count(threshold)
