from .embedding import (
    Edit,
    EditKind,
    Embedding,
    RelabelOptions,
    find_embeddings,
    min_edits,
)
from .relabeler import (
    RelabelOutcome,
    RelabelStatus,
    insert_tags,
    relabel,
    strip_trailing_tag,
    tagged_outputs,
)
