from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

import pandas as pd
from rich.table import Table

from ..relabel import RelabelOutcome, RelabelStatus
from .align import WerReport
from .latency import ep_quantiles
from .longform import DEFAULT_THRESHOLD, LongformReport


def to_ms(seconds: float) -> int:
    """Convert seconds to whole milliseconds, as endpointer tables show them."""
    return round(seconds * 1000)


def relative_change(baseline: float, candidate: float) -> float:
    """Get the fraction by which `candidate` improves on `baseline`.

    Positive values are improvements for lower-is-better metrics, e.g. 62 long
    deletions down to 28 is an improvement of about 0.548.
    """
    if baseline == 0:
        raise ZeroDivisionError("Relative change from a zero baseline is undefined.")
    return (baseline - candidate) / baseline


@dataclass
class LongformTally:
    """Running totals of long-form deletion results over a stream of records.

    Only counts are kept, so memory does not grow with the number of records.
    """

    threshold: int = DEFAULT_THRESHOLD
    kind: str = "longform"
    wer: WerReport | None = None
    run_count: int = 0
    records: int = 0
    expected_run_count: int | None = None
    mismatches: int = 0

    def add(self, report: LongformReport, expected: int | None = None):
        """Add one record's report, and its known run count if there is one."""
        if self.wer is None:
            self.wer = report.wer_report
        else:
            self.wer = self.wer + report.wer_report
        self.run_count += report.run_count
        self.records += 1
        if expected is not None:
            self.expected_run_count = (self.expected_run_count or 0) + expected
            self.mismatches += expected != report.run_count

    def to_dict(self) -> dict[str, Any]:
        """Serialize the totals as a report file body."""
        return {
            "kind": self.kind,
            "threshold": self.threshold,
            "records": self.records,
            "wer": self.wer.to_dict() if self.wer else None,
            "run_count": self.run_count,
            "expected_run_count": self.expected_run_count,
            "mismatches": self.mismatches,
        }


@dataclass
class EpTally:
    """Endpointer latencies and endpointed WER over a stream of Short records."""

    latencies: list[float] = field(default_factory=list)
    unclosed: int = 0
    wer: WerReport | None = None

    def add(self, latency: float | None, wer: WerReport | None = None):
        """Add one record's latency (None if the microphone never closed)."""
        if latency is None:
            self.unclosed += 1
        else:
            self.latencies.append(latency)
        if wer is not None:
            self.wer = wer if self.wer is None else self.wer + wer

    def to_dict(self) -> dict[str, Any]:
        """Serialize the quantiles, in milliseconds, as a report file body."""
        ep50 = ep90 = None
        if self.latencies:
            ep50, ep90 = (to_ms(q) for q in ep_quantiles(self.latencies))
        return {
            "kind": "ep",
            "records": len(self.latencies) + self.unclosed,
            "closed": len(self.latencies),
            "unclosed": self.unclosed,
            "ep50_ms": ep50,
            "ep90_ms": ep90,
            "wer": self.wer.to_dict() if self.wer else None,
        }


@dataclass
class RelabelTally:
    """Outcome counts over a stream of relabeled records."""

    counts: dict[RelabelStatus, int] = field(
        default_factory=lambda: dict.fromkeys(RelabelStatus, 0)
    )
    expected: int = 0
    mismatches: int = 0

    @property
    def records(self) -> int:
        """Total number of records seen."""
        return sum(self.counts.values())

    def add(
        self,
        outcome: RelabelOutcome,
        expected_status: RelabelStatus | None = None,
        expected_transcript: str | None = None,
    ) -> bool | None:
        """Add one outcome and check it against the expected one, if given.

        Returns
        -------
        bool | None
            Whether the outcome matched, or None if nothing was expected
        """
        self.counts[outcome.status] += 1
        if expected_status is None:
            return None

        self.expected += 1
        agrees = outcome.status == expected_status and (
            expected_transcript is None or outcome.text == expected_transcript
        )
        self.mismatches += not agrees
        return agrees

    def to_dict(self) -> dict[str, Any]:
        """Serialize the counts as a report file body."""
        return {
            "kind": "relabel",
            "records": self.records,
            **{str(status): n for status, n in self.counts.items()},
            "expected": self.expected,
            "mismatches": self.mismatches,
        }


def relabel_table(tally: RelabelTally) -> Table:
    """Render relabel outcome counts."""
    table = Table(title="Relabel")
    table.add_column("Outcome")
    table.add_column("Records", justify="right")
    for status, n in tally.counts.items():
        table.add_row(str(status), str(n))
    table.add_row("total", str(tally.records), end_section=True)
    if tally.expected:
        table.add_row("mismatched expected", str(tally.mismatches))
    return table


def _wer_cell(wer: WerReport | None) -> str:
    return str(wer) if wer is not None else "-"


def longform_table(rows: Mapping[str, LongformTally]) -> Table:
    """Render long-form deletion results as `WER (D/I/S)` and `# of N del.` columns.

    Parameters
    ----------
    rows : Mapping[str, LongformTally]
        Row label to totals; all rows should share a threshold

    Returns
    -------
    Table
        A rich table ready to print
    """
    threshold = next(iter(rows.values())).threshold if rows else DEFAULT_THRESHOLD
    table = Table(title="Long-form deletion")
    table.add_column("Setup")
    table.add_column("WER (D/I/S)", justify="right")
    table.add_column(f"# of {threshold} del.", justify="right")

    has_truth = any(t.expected_run_count is not None for t in rows.values())
    if has_truth:
        table.add_column("Expected", justify="right")
        table.add_column("Mismatched records", justify="right")

    for name, tally in rows.items():
        cells = [name, _wer_cell(tally.wer), str(tally.run_count)]
        if has_truth:
            expected = tally.expected_run_count
            expected = "-" if expected is None else expected
            cells += [str(expected), str(tally.mismatches)]
        table.add_row(*cells)
    return table


def endpointer_table(rows: Mapping[str, EpTally]) -> Table:
    """Render endpointer results as `WER`, `EP50` and `EP90` (milliseconds) columns."""
    table = Table(title="Endpointer")
    table.add_column("Setup")
    table.add_column("WER", justify="right")
    table.add_column("EP50", justify="right")
    table.add_column("EP90", justify="right")
    table.add_column("Unclosed", justify="right")
    for name, tally in rows.items():
        body = tally.to_dict()
        table.add_row(
            name,
            f"{tally.wer.wer:.1f}" if tally.wer else "-",
            "-" if body["ep50_ms"] is None else str(body["ep50_ms"]),
            "-" if body["ep90_ms"] is None else str(body["ep90_ms"]),
            str(tally.unclosed),
        )
    return table


def compare_reports(
    baseline: Mapping[str, Any],
    candidates: Mapping[str, Mapping[str, Any]],
) -> pd.DataFrame:
    """Compare long-form reports against a baseline.

    Parameters
    ----------
    baseline : Mapping[str, Any]
        A report body as written by `LongformTally.to_dict`
    candidates : Mapping[str, Mapping[str, Any]]
        Candidate name to report body

    Returns
    -------
    pd.DataFrame
        One row per candidate with its WER, run count and the relative improvement
        of each over the baseline, in percent
    """
    base_wer = baseline["wer"]["wer"]
    base_runs = baseline["run_count"]
    rows = []
    for name, report in candidates.items():
        wer = report["wer"]["wer"]
        runs = report["run_count"]
        rows.append(
            {
                "setup": name,
                "wer": wer,
                "run_count": runs,
                "wer_improvement_pct": 100 * relative_change(base_wer, wer)
                if base_wer
                else float("nan"),
                "run_improvement_pct": 100 * relative_change(base_runs, runs)
                if base_runs
                else float("nan"),
            }
        )
    return pd.DataFrame(
        rows,
        columns=[
            "setup",
            "wer",
            "run_count",
            "wer_improvement_pct",
            "run_improvement_pct",
        ],
    ).set_index("setup")


def frame_table(frame: pd.DataFrame, title: str) -> Table:
    """Render a comparison frame as a rich table with one decimal per number."""
    table = Table(title=title)
    table.add_column(frame.index.name or "")
    for col in frame.columns:
        table.add_column(str(col), justify="right")
    for name, *values in frame.itertuples():
        table.add_row(
            str(name),
            *(f"{v:.1f}" if isinstance(v, float) else str(v) for v in values),
        )
    return table
