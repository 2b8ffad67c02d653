"""Synthetic corpora with planted structure, plus a reference oracle."""

from .generator import GroundTruth, SynthCorpus, SynthParams, generate_corpus, synth_config, write_corpus
from .oracle import compare_metrics, oracle_metrics

__all__ = [
    "GroundTruth",
    "SynthCorpus",
    "SynthParams",
    "compare_metrics",
    "generate_corpus",
    "oracle_metrics",
    "synth_config",
    "write_corpus",
]
