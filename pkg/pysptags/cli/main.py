import logging
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import replace
from enum import StrEnum
from functools import partial
from pathlib import Path
from typing import Annotated, Any

import orjson
import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

from ..config import Config, CorpusKind
from ..corpus import (
    STDIO,
    EvalRecord,
    JsonlReader,
    JsonlWriter,
    RelabelRecord,
    ScoreRecord,
    TaggedRecord,
    create_parents_or_fail,
)
from ..errors import PySpTagsError
from ..metrics import (
    EpTally,
    LongformTally,
    RelabelTally,
    compare_reports,
    endpointer_table,
    frame_table,
    longform_table,
    relabel_table,
)
from ..metrics.longform import Domain
from ..runner import CorpusRunner
from ..synth import FailureKind, generate_relabel_pair
from ..transcript import EndpointMode, ViewKind
from . import tasks

logger = logging.getLogger(__name__)

app = typer.Typer(
    no_args_is_help=True,
    help="Relabel, view and score speaker-tagged ASR transcripts.",
)
console = Console()
err_console = Console(stderr=True)


class OutputFormat(StrEnum):
    """What goes to standard output."""

    JSONL = "jsonl"
    SUMMARY = "summary"


SourceArg = Annotated[
    str, typer.Argument(metavar="INPUT", help='JSON Lines file, or "-" for stdin.')
]
OutputOpt = Annotated[
    Path | None,
    typer.Option("--output", "-o", dir_okay=False, help="Write result lines here."),
]
ReportOpt = Annotated[
    Path | None,
    typer.Option(dir_okay=False, help="Write the summary as JSON here."),
]
FormatOpt = Annotated[
    OutputFormat,
    typer.Option(
        "--format",
        help="jsonl streams result lines to stdout when no --output is given; "
        "summary prints only the summary table.",
    ),
]
StrictOpt = Annotated[
    bool | None,
    typer.Option("--strict/--lenient", help="Abort on, or skip, malformed lines."),
]
WorkersOpt = Annotated[
    int | None,
    typer.Option(min=1, help="Worker processes (default: PYSPTAGS_WORKERS or 1)."),
]
ThresholdOpt = Annotated[
    int | None, typer.Option(min=1, help="Minimum deletion run length to count.")
]
ViewOpt = Annotated[
    ViewKind | None, typer.Option("--view", help="Which words of the hypothesis.")
]


def _given(**values: Any) -> dict[str, Any]:
    """Keep only the options set on the command line."""
    return {k: v for k, v in values.items() if v is not None}


def _configure_logging(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


@contextmanager
def _errors() -> Iterator[None]:
    """Turn library errors into a diagnostic and exit code 1."""
    try:
        yield
    except (PySpTagsError, ValueError, OSError) as e:
        err_console.print(f"[red]Error:[/red] {escape(str(e))}", soft_wrap=True)
        raise typer.Exit(code=1) from e


@contextmanager
def _sink(output: Path | None, fmt: OutputFormat) -> Iterator[JsonlWriter | None]:
    if output is None and fmt == OutputFormat.SUMMARY:
        yield None
        return
    with JsonlWriter(output, overwrite=True) as writer:
        yield writer


def _setup_name(source: str) -> str:
    return "stdin" if source == STDIO else Path(source).stem


def _finish(
    body: dict[str, Any],
    table: Table,
    reader: JsonlReader | None,
    report: Path | None,
    fmt: OutputFormat,
    output: Path | None,
):
    """Write the report file and print the summary where it won't mix with lines."""
    if reader is not None:
        body["skipped"] = reader.skipped
        if reader.skipped:
            logger.warning("Skipped %d malformed line(s)", reader.skipped)
    if report is not None:
        create_parents_or_fail(report, overwrite=True)
        report.write_bytes(orjson.dumps(body, option=orjson.OPT_INDENT_2))

    streaming = fmt == OutputFormat.JSONL and output is None
    (err_console if streaming else console).print(table)


def _runner(config: Config, workers: int | None) -> CorpusRunner:
    return CorpusRunner(workers or config.runner.workers, config.runner.window)


def _strict(config: Config, strict: bool | None) -> bool:
    return config.runner.strict if strict is None else strict


@app.callback()
def main(
    ctx: typer.Context,
    settings: Annotated[
        Path | None,
        typer.Option(
            exists=True, dir_okay=False, help="A settings.toml with default options."
        ),
    ] = None,
    verbose: Annotated[
        bool, typer.Option("--verbose", "-v", help="Log debug output.")
    ] = False,
):
    """Relabel, view and score speaker-tagged ASR transcripts."""
    _configure_logging(verbose)
    with _errors():
        ctx.obj = Config.load(settings)


@app.command()
def relabel(
    ctx: typer.Context,
    source: SourceArg,
    output: OutputOpt = None,
    edit_budget: Annotated[
        int | None, typer.Option(min=0, help="Edits tolerated per utterance.")
    ] = None,
    cap: Annotated[
        int | None, typer.Option(min=1, help="Stop enumerating after this many.")
    ] = None,
    segmented: Annotated[
        bool | None,
        typer.Option(
            "--segmented/--unsegmented",
            help="Treat every utterance as a chunk and drop its closing tag.",
        ),
    ] = None,
    strict: StrictOpt = None,
    fmt: FormatOpt = OutputFormat.JSONL,
    report: ReportOpt = None,
    workers: WorkersOpt = None,
):
    """Insert speaker-tags into paired primary / all-speech transcripts."""
    config: Config = ctx.obj
    settings = replace(
        config.relabel,
        **_given(edit_budget=edit_budget, enumeration_cap=cap, segmented=segmented),
    )
    tally = RelabelTally()
    with _errors():
        task = partial(tasks.relabel_record, settings.options())
        reader = JsonlReader(source, RelabelRecord.from_dict, _strict(config, strict))
        with _sink(output, fmt) as sink:
            for out, outcome in _runner(config, workers).map(task, reader):
                agrees = tally.add(
                    outcome, out.get("expected_status"), out.get("expected_transcript")
                )
                if agrees is not None:
                    out["agrees"] = agrees
                if sink is not None:
                    sink.write(out)
    _finish(tally.to_dict(), relabel_table(tally), reader, report, fmt, output)


@app.command(name="view")
def view_command(
    ctx: typer.Context,
    source: SourceArg,
    output: OutputOpt = None,
    kind: ViewOpt = None,
    strict: StrictOpt = None,
    fmt: FormatOpt = OutputFormat.JSONL,
):
    """Render tagged transcripts as the primary-only or all-speech view."""
    config: Config = ctx.obj
    kind = kind or config.longform.view
    count = 0
    with _errors():
        reader = JsonlReader(source, TaggedRecord.from_dict, _strict(config, strict))
        with _sink(output, fmt) as sink:
            for record in reader:
                out = tasks.view_record(kind, record)
                count += 1
                if sink is not None:
                    sink.write(out)

    table = Table(title="View")
    table.add_column("View")
    table.add_column("Records", justify="right")
    table.add_row(str(kind), str(count))
    _finish({"kind": "view", "records": count}, table, reader, None, fmt, output)


@app.command()
def score(
    ctx: typer.Context,
    source: SourceArg,
    output: OutputOpt = None,
    report: ReportOpt = None,
    kind: ViewOpt = None,
    threshold: ThresholdOpt = None,
    strict: StrictOpt = None,
    fmt: FormatOpt = OutputFormat.JSONL,
    workers: WorkersOpt = None,
):
    """Score untimed reference / hypothesis pairs as WER (D/I/S) and long deletions."""
    config: Config = ctx.obj
    settings = replace(config.longform, **_given(threshold=threshold, view=kind))
    tally = LongformTally(settings.threshold, kind="score")
    with _errors():
        task = partial(tasks.score_record, settings.threshold, settings.view)
        reader = JsonlReader(source, ScoreRecord.from_dict, _strict(config, strict))
        with _sink(output, fmt) as sink:
            for out, result in _runner(config, workers).map(task, reader):
                tally.add(result)
                if sink is not None:
                    sink.write(out)

    table = longform_table({_setup_name(source): tally})
    _finish(tally.to_dict(), table, reader, report, fmt, output)


@app.command()
def longform(
    ctx: typer.Context,
    source: SourceArg,
    output: OutputOpt = None,
    report: ReportOpt = None,
    threshold: ThresholdOpt = None,
    kind: ViewOpt = None,
    strict: StrictOpt = None,
    fmt: FormatOpt = OutputFormat.JSONL,
    workers: WorkersOpt = None,
):
    """Count long deletion runs that start after the end of the noise."""
    config: Config = ctx.obj
    settings = replace(config.longform, **_given(threshold=threshold, view=kind))
    primary_view = settings.view == ViewKind.PRIMARY_ONLY
    tally = LongformTally(settings.threshold)
    with _errors():
        task = partial(tasks.longform_record, settings.threshold, primary_view)
        reader = JsonlReader(source, EvalRecord.from_dict, _strict(config, strict))
        with _sink(output, fmt) as sink:
            for out, result, expected in _runner(config, workers).map(task, reader):
                tally.add(result, expected)
                if sink is not None:
                    sink.write(out)

    if tally.mismatches:
        logger.warning(
            "%d record(s) disagree with their injected ground truth", tally.mismatches
        )
    table = longform_table({_setup_name(source): tally})
    _finish(tally.to_dict(), table, reader, report, fmt, output)


@app.command()
def ep(
    ctx: typer.Context,
    source: SourceArg,
    output: OutputOpt = None,
    report: ReportOpt = None,
    endpoint: Annotated[
        EndpointMode | None,
        typer.Option(help="Close on the first <end-primary>, or on <end-of-speech>."),
    ] = None,
    strict: StrictOpt = None,
    fmt: FormatOpt = OutputFormat.JSONL,
    workers: WorkersOpt = None,
):
    """Compute EP50 / EP90 endpointer latency and endpointed WER on Short records."""
    config: Config = ctx.obj
    mode = endpoint or config.longform.endpoint
    tally = EpTally()
    other_domains = 0
    with _errors():
        task = partial(tasks.ep_record, mode)
        reader = JsonlReader(source, EvalRecord.from_dict, _strict(config, strict))
        with _sink(output, fmt) as sink:
            for result in _runner(config, workers).map(task, reader):
                if result is None:
                    other_domains += 1
                    continue
                out, latency, wer = result
                tally.add(latency, wer)
                if sink is not None:
                    sink.write(out)

    if other_domains:
        logger.info("Ignored %d record(s) outside the short domain", other_domains)
    body = tally.to_dict() | {"ignored": other_domains}
    table = endpointer_table({_setup_name(source): tally})
    _finish(body, table, reader, report, fmt, output)


@app.command()
def synth(
    ctx: typer.Context,
    output: OutputOpt = None,
    kind: Annotated[
        CorpusKind | None, typer.Option(help="Eval records or relabel pairs.")
    ] = None,
    model: Annotated[
        FailureKind | None, typer.Option(help="How the simulated recognizer fails.")
    ] = None,
    seed: Annotated[int | None, typer.Option(help="Corpus seed.")] = None,
    n_utts: Annotated[int | None, typer.Option(min=1)] = None,
    words_per_utt: Annotated[int | None, typer.Option(min=1)] = None,
    domain: Annotated[Domain | None, typer.Option()] = None,
    noise_placement: Annotated[float | None, typer.Option()] = None,
    burst_start_word: Annotated[int | None, typer.Option(min=0)] = None,
    burst_len: Annotated[int | None, typer.Option(min=1)] = None,
    resume_after_words: Annotated[int | None, typer.Option(min=1)] = None,
    perturb_rate: Annotated[float | None, typer.Option()] = None,
    ambiguity_rate: Annotated[float | None, typer.Option()] = None,
    empty_primary_rate: Annotated[float | None, typer.Option()] = None,
    segmented_rate: Annotated[float | None, typer.Option()] = None,
    fmt: FormatOpt = OutputFormat.JSONL,
    workers: WorkersOpt = None,
):
    """Generate a synthetic corpus with known ground truth."""
    config: Config = ctx.obj
    threshold = config.longform.threshold
    expected = count = 0
    with _errors():
        settings = replace(
            config.synth,
            **_given(
                kind=kind,
                model=model,
                seed=seed,
                n_utts=n_utts,
                words_per_utt=words_per_utt,
                domain=domain,
                noise_placement=noise_placement,
                burst_start_word=burst_start_word,
                burst_len=burst_len,
                resume_after_words=resume_after_words,
                perturb_rate=perturb_rate,
                ambiguity_rate=ambiguity_rate,
                empty_primary_rate=empty_primary_rate,
                segmented_rate=segmented_rate,
            ),
        )
        spec = settings.spec()
        with _sink(output, fmt) as sink:
            if settings.kind == CorpusKind.RELABEL:
                for index in range(spec.n_utts):
                    pair = generate_relabel_pair(spec, settings.seed, index)
                    count += 1
                    if sink is not None:
                        sink.write(RelabelRecord.from_pair(pair).to_dict())
            else:
                task = partial(
                    tasks.synth_record, spec, settings.failure_model(), threshold
                )
                indices = range(spec.n_utts)
                for out, injected in _runner(config, workers).map(task, indices):
                    count += 1
                    expected += injected
                    if sink is not None:
                        sink.write(out)

    table = Table(title="Synthetic corpus")
    table.add_column("Kind")
    table.add_column("Model")
    table.add_column("Records", justify="right")
    table.add_column(f"Injected # of {threshold} del.", justify="right")
    is_eval = settings.kind == CorpusKind.EVAL
    table.add_row(
        str(settings.kind),
        str(settings.model) if is_eval else "-",
        str(count),
        str(expected) if is_eval else "-",
    )
    body = {"kind": "synth", "records": count, "expected_run_count": expected}
    _finish(body, table, None, None, fmt, output)


@app.command()
def diff(
    baseline: Annotated[
        Path, typer.Argument(exists=True, dir_okay=False, help="Baseline report.")
    ],
    candidates: Annotated[
        list[Path],
        typer.Argument(exists=True, dir_okay=False, help="Candidate reports."),
    ],
    csv: Annotated[
        Path | None, typer.Option(dir_okay=False, help="Also write the table as CSV.")
    ] = None,
):
    """Compare long-form or score reports against a baseline."""
    with _errors():
        reports = {}
        for path in (baseline, *candidates):
            body = orjson.loads(path.read_bytes())
            if body.get("kind") not in ("longform", "score") or not body.get("wer"):
                raise PySpTagsError(f"{path} is not a non-empty long-form report")
            reports[path] = body

        frame = compare_reports(
            reports[baseline], {path.stem: reports[path] for path in candidates}
        )
        if csv is not None:
            create_parents_or_fail(csv, overwrite=True)
            frame.to_csv(csv)
    console.print(frame_table(frame, f"Relative to {baseline.stem} (%)"))
