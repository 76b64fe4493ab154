"""scikit-learn compatible wrappers.

These let the scorer sit inside a :class:`sklearn.pipeline.Pipeline`::

    Pipeline([("books", BookStructurer()), ("emotion", EmotionScorer(lexicon="feil.tsv"))])

``transform`` output is a dense ``(n_documents, n_emotions)`` array of
per-1000-token scores.
"""

from __future__ import annotations

from numbers import Integral, Real
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_scalar
from sklearn.utils.validation import check_is_fitted

from .embed import EmbeddingSpace, build_ppmi_space, propose_additions
from .errors import EmptyDocument, EmptySegment
from .ingest import Metadata, strip_boilerplate
from .lexicon import EmotionLexicon, LexiconPatch, apply_patch, read_lexicon, read_patch
from .score import EmotionProfile, score_document
from .structure import AnnotatedDocument, Strategy, chapterize, fallback_tokenize


def check_documents(X) -> list[AnnotatedDocument]:
    """Validate an iterable of :class:`AnnotatedDocument`."""
    if isinstance(X, AnnotatedDocument):
        raise TypeError("expected a sequence of documents, got a single AnnotatedDocument")
    docs = list(X)
    for i, d in enumerate(docs):
        if not isinstance(d, AnnotatedDocument):
            raise TypeError(f"element {i} is {type(d).__name__}, expected AnnotatedDocument")
    return docs


def check_strategy(strategy) -> Strategy:
    try:
        return Strategy(strategy)
    except ValueError:
        choices = ", ".join(s.value for s in Strategy)
        raise ValueError(f"strategy must be one of {choices}; got {strategy!r}") from None


def check_lexicon(lexicon) -> EmotionLexicon:
    if isinstance(lexicon, EmotionLexicon):
        return lexicon
    if isinstance(lexicon, (str, Path)):
        return read_lexicon(lexicon)
    raise TypeError(f"lexicon must be an EmotionLexicon or a path, got {type(lexicon).__name__}")


class BookStructurer(TransformerMixin, BaseEstimator):
    """Raw book text -> chapterized :class:`AnnotatedDocument` (fallback tokenizer)."""

    def __init__(self, strip=True):
        self.strip = strip

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        docs = []
        for i, text in enumerate(X):
            if not isinstance(text, str):
                raise TypeError(f"element {i} is {type(text).__name__}, expected str")
            body = strip_boilerplate(text)[0] if self.strip else text
            doc = fallback_tokenize(body, Metadata.placeholder(f"doc{i}"))
            docs.append(chapterize(doc, body))
        return docs


class EmotionScorer(TransformerMixin, BaseEstimator):
    """Lexicon-based emotion scoring of documents.

    Parameters
    ----------
    lexicon : EmotionLexicon or path
    patches : sequence of LexiconPatch or paths, applied in order during ``fit``
    strategy : {"first-paragraphs", "chapter-openings"}
        With chapter openings each document's row is the mean over chapters.
    n_paragraphs, k_tokens : segmentation sizes
    """

    def __init__(self, lexicon=None, patches=(), strategy="first-paragraphs", n_paragraphs=3, k_tokens=200):
        self.lexicon = lexicon
        self.patches = patches
        self.strategy = strategy
        self.n_paragraphs = n_paragraphs
        self.k_tokens = k_tokens

    def fit(self, X=None, y=None):
        if self.lexicon is None:
            raise ValueError("EmotionScorer requires a lexicon")
        check_strategy(self.strategy)
        check_scalar(self.n_paragraphs, "n_paragraphs", Integral, min_val=1)
        check_scalar(self.k_tokens, "k_tokens", Integral, min_val=1)
        lex = check_lexicon(self.lexicon)
        for p in self.patches:
            lex = apply_patch(lex, p if isinstance(p, LexiconPatch) else read_patch(p))
        self.lexicon_ = lex
        self.emotions_ = lex.emotions
        self.n_features_out_ = len(self.emotions_)
        return self

    def profiles(self, X) -> list[EmotionProfile]:
        """Full profiles (all chapter rows included for chapter openings)."""
        check_is_fitted(self, "lexicon_")
        out = []
        for doc in check_documents(X):
            profs, _ = score_document(
                doc, self.lexicon_, check_strategy(self.strategy), self.n_paragraphs, self.k_tokens, self.emotions_
            )
            out.extend(profs)
        return out

    def transform(self, X):
        check_is_fitted(self, "lexicon_")
        strategy = check_strategy(self.strategy)
        docs = check_documents(X)
        out = np.zeros((len(docs), len(self.emotions_)))
        for i, doc in enumerate(docs):
            try:
                profs, _ = score_document(doc, self.lexicon_, strategy, self.n_paragraphs, self.k_tokens, self.emotions_)
            except (EmptyDocument, EmptySegment):
                continue
            row = profs[-1]
            out[i] = [row.scores[e] for e in self.emotions_]
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "emotions_")
        return np.asarray(self.emotions_, dtype=object)


class PPMIEmbedder(BaseEstimator):
    """Fit PPMI word vectors on a corpus and propose lexicon additions."""

    def __init__(self, window=5, min_count=5):
        self.window = window
        self.min_count = min_count

    def fit(self, X, y=None):
        check_scalar(self.window, "window", Integral, min_val=1)
        check_scalar(self.min_count, "min_count", Integral, min_val=1)
        self.space_: EmbeddingSpace = build_ppmi_space(check_documents(X), self.window, self.min_count)
        self.vocabulary_ = {w: i for i, w in enumerate(self.space_.words)}
        return self

    def transform(self, words):
        """Dense vectors for ``words``; unknown words map to zero rows."""
        check_is_fitted(self, "space_")
        out = np.zeros((len(words), self.space_.dim))
        for i, w in enumerate(words):
            if w in self.space_:
                out[i] = self.space_.vector(w)
        return out

    def propose(self, lexicon, candidates, k=5, min_sim=0.7):
        check_is_fitted(self, "space_")
        check_scalar(k, "k", Integral, min_val=1)
        check_scalar(min_sim, "min_sim", Real, min_val=-1.0, max_val=1.0)
        return propose_additions(self.space_, check_lexicon(lexicon), candidates, k, min_sim)
