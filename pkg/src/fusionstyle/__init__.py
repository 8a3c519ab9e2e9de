"""Fusion-index analysis of summary sentences and a toy style-adaptive summarizer."""

from .labeling import DEFAULT_GAMMA, OracleConfig, Style, StyleLabel, corpus_stats, label_pair
from .metrics import DEFAULT_K, extractive_fragments, fusion_index, novel_ngram_fraction
from .text import Document, Sentence, make_document, split_sentences, tokenize

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_GAMMA",
    "DEFAULT_K",
    "Document",
    "OracleConfig",
    "Sentence",
    "Style",
    "StyleLabel",
    "corpus_stats",
    "extractive_fragments",
    "fusion_index",
    "label_pair",
    "make_document",
    "novel_ngram_fraction",
    "split_sentences",
    "tokenize",
]
