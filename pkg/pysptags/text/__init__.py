from .normalizer import NormalizedWord, normalize_seq, normalize_word
