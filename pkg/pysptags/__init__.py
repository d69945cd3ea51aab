from .metrics import align, ep_quantiles, longform_count, wer_report
from .relabel import RelabelOptions, RelabelStatus, relabel
from .transcript import TaggedTranscript, parse_tagged, render_tagged, view
