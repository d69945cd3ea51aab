from .runner import CorpusRunner
