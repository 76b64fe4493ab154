"""Lexicon-based emotion scoring of literary texts, used as a proxy for mood."""

__version__ = "0.1.0"

from .embed import EmbeddingSpace, build_ppmi_space, cosine, load_vectors, propose_additions
from .estimators import BookStructurer, EmotionScorer, PPMIEmbedder
from .ingest import CleanDocument, Metadata, RawBook, clean_book, detect_translation, extract_metadata
from .ingest import normalize_encoding, strip_boilerplate
from .lexicon import (
    CANONICAL_EMOTIONS,
    EmotionLexicon,
    LexiconPatch,
    apply_patch,
    cooccurrence,
    load_lexicon,
    read_lexicon,
)
from .score import EmotionProfile, compare_strategies, score_corpus, score_segment
from .structure import (
    AnnotatedDocument,
    Segment,
    Strategy,
    Token,
    chapterize,
    fallback_tokenize,
    parse_conllu,
    segment_chapter_openings,
    segment_first_paragraphs,
)

__all__ = [
    "AnnotatedDocument",
    "BookStructurer",
    "CANONICAL_EMOTIONS",
    "CleanDocument",
    "EmbeddingSpace",
    "EmotionLexicon",
    "EmotionProfile",
    "EmotionScorer",
    "LexiconPatch",
    "Metadata",
    "PPMIEmbedder",
    "RawBook",
    "Segment",
    "Strategy",
    "Token",
    "apply_patch",
    "build_ppmi_space",
    "chapterize",
    "clean_book",
    "compare_strategies",
    "cooccurrence",
    "cosine",
    "detect_translation",
    "extract_metadata",
    "fallback_tokenize",
    "load_lexicon",
    "load_vectors",
    "normalize_encoding",
    "parse_conllu",
    "propose_additions",
    "read_lexicon",
    "score_corpus",
    "score_segment",
    "segment_chapter_openings",
    "segment_first_paragraphs",
    "strip_boilerplate",
]
