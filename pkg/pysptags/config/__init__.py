from .config import (
    WORKERS_ENV,
    Config,
    CorpusKind,
    LongformSettings,
    RelabelSettings,
    RunnerSettings,
    SynthSettings,
    workers_from_env,
)
