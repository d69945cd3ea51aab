from itertools import product

ONSETS = (
    "b", "d", "f", "g", "h", "j", "k", "l", "m", "n", "p", "r",
    "s", "t", "v", "w", "z", "ch", "sh", "th", "br", "dr", "kl", "st",
)  # fmt: skip
RIMES = (
    "ako", "eri", "ilu", "ona", "uma", "ade", "eso", "iva", "ote", "ulo",
    "ani", "eku", "imo", "ora", "ube", "alo", "epi", "iru", "osa", "uti",
)  # fmt: skip

#: Pronounceable pseudo-words. Utterances draw from this list without replacement,
#: so any repetition in a synthetic transcript is put there on purpose.
VOCABULARY = tuple(onset + rime for onset, rime in product(ONSETS, RIMES))

#: Words that never occur in `VOCABULARY`; used for hallucinations and insertions.
FILLERS = ("uh", "um", "erm", "hmm", "mhm", "ah")
