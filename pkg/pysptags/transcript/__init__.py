from .model import (
    END_OTHERS,
    END_PRIMARY,
    Segment,
    Speaker,
    TaggedTranscript,
    Token,
    TokenKind,
    parse_tagged,
    render_tagged,
    segments,
)
from .view import (
    EndpointMode,
    MicCloseResult,
    ViewKind,
    canonicalize_tags,
    endpoint_truncate,
    view,
)
