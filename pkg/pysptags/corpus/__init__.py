from .jsonl import (
    STDIO,
    JsonlReader,
    JsonlWriter,
    create_parents_or_fail,
    read_jsonl,
    write_jsonl,
)
from .records import (
    BaseRecord,
    EvalRecord,
    RelabelRecord,
    ScoreRecord,
    TaggedRecord,
)
