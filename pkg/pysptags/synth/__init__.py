from .failures import (
    BurstDeleter,
    FailureKind,
    FailureModel,
    Oracle,
    RandomErrors,
    StuckAfterNoise,
    make_failure_model,
)
from .generator import (
    GroundTruth,
    PairCase,
    RelabelPair,
    SynthSpec,
    generate_corpus,
    generate_record,
    generate_relabel_pair,
    generate_relabel_pairs,
    iter_corpus,
)
from .vocabulary import FILLERS, VOCABULARY
