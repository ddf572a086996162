"""Find every byte of a small target set in a buffer, with SIMD-style kernels."""

from .charset import CharSet, build_charset, default_html_set, is_member, parse_charset
from .corpus import CorpusDoc, SynthParams, corpus_stats, generate_synthetic, load_corpus
from .kernels import (
    KernelId,
    build_index64,
    classify16,
    first_index_blink,
    first_index_webkit,
    scan_block16,
    scan_scalar,
)
from .stream import MatchStream, ScanCounters, all_matches, count_matches, next_match, open_stream

__all__ = [
    "CharSet", "CorpusDoc", "KernelId", "MatchStream", "ScanCounters", "SynthParams",
    "all_matches", "build_charset", "build_index64", "classify16", "corpus_stats", "count_matches",
    "default_html_set", "first_index_blink", "first_index_webkit", "generate_synthetic", "is_member",
    "load_corpus", "next_match", "open_stream", "parse_charset", "scan_block16", "scan_scalar",
]

__version__ = "0.1.0"
