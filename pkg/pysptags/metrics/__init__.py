from .align import (
    Alignment,
    AlignOp,
    AlignOpKind,
    WerReport,
    align,
    corpus_wer,
    wer_report,
)
from .latency import ep_latency, ep_quantiles, nearest_rank
from .longform import (
    DEFAULT_THRESHOLD,
    DeletionRun,
    Domain,
    LongformReport,
    NoiseWindow,
    TimedWord,
    UtteranceRecord,
    deletion_runs,
    longform_count,
    passes_noise_gate,
)
from .reports import (
    EpTally,
    LongformTally,
    RelabelTally,
    compare_reports,
    endpointer_table,
    frame_table,
    longform_table,
    relabel_table,
    relative_change,
    to_ms,
)
