"""Word vectors for lexicon refinement.

Vectors come either from a word2vec-style text file or from a PPMI-weighted
co-occurrence matrix built over the corpus itself.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from .errors import DimensionMismatch, EmptyCorpus, InvalidParameter, MalformedHeader, ZeroVector
from .lexicon import Addition, Association, EmotionLexicon, order_emotions
from .structure import AnnotatedDocument

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EmbeddingSpace:
    """Vocabulary plus one row per word; ``matrix`` may be dense or CSR."""

    words: tuple[str, ...]
    matrix: np.ndarray | sparse.csr_matrix
    warnings: tuple[str, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.matrix.ndim != 2 or self.matrix.shape[1] < 1:
            raise ValueError("embedding dimension must be positive")
        if self.matrix.shape[0] != len(self.words):
            raise ValueError("matrix rows do not match vocabulary size")
        object.__setattr__(self, "_index", {w: i for i, w in enumerate(self.words)})

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._index

    def vector(self, word: str) -> np.ndarray:
        row = self.matrix[self._index[word.lower()]]
        if sparse.issparse(row):
            return np.asarray(row.todense()).ravel()
        return np.asarray(row, dtype=float)

    def dense(self) -> np.ndarray:
        if sparse.issparse(self.matrix):
            return self.matrix.toarray()
        return np.asarray(self.matrix, dtype=float)

    def _rows(self, indices: Sequence[int]) -> np.ndarray:
        sub = self.matrix[list(indices)]
        return sub.toarray() if sparse.issparse(sub) else np.asarray(sub, dtype=float)


def load_vectors(lines: Iterable[str]) -> EmbeddingSpace:
    """Read the plain-text word2vec format (``vocab_size dim`` header)."""
    it = iter(lines)
    header = next(it, None)
    if header is None:
        raise MalformedHeader("empty vector file")
    parts = header.split()
    if len(parts) != 2 or not all(p.isdigit() for p in parts) or int(parts[1]) < 1:
        raise MalformedHeader(f"expected 'vocab_size dim', got {header.strip()!r}")
    dim = int(parts[1])
    rows: dict[str, np.ndarray] = {}
    warnings = []
    for line_no, line in enumerate(it, start=2):
        fields = line.rstrip("\n").split(" ")
        fields = [f for f in fields if f]
        if not fields:
            continue
        word, comps = fields[0].lower(), fields[1:]
        if len(comps) != dim:
            raise DimensionMismatch(line_no, dim, len(comps))
        if word in rows:
            warnings.append(f"line {line_no}: duplicate word {word!r}; last wins")
            del rows[word]
        rows[word] = np.array([float(c) for c in comps])
    if len(rows) != int(parts[0]):
        warnings.append(f"header declares {parts[0]} words, file has {len(rows)}")
    words = tuple(rows)
    matrix = np.vstack(list(rows.values())) if rows else np.zeros((0, dim))
    return EmbeddingSpace(words, matrix, tuple(warnings))


def cosine(u, v) -> float:
    """Cosine similarity of two nonzero vectors, clipped to [-1, 1]."""
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    if u.shape != v.shape:
        raise InvalidParameter(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    nu, nv = math.sqrt(float(u @ u)), math.sqrt(float(v @ v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("cosine undefined for a zero vector")
    return max(-1.0, min(1.0, float(u @ v) / (nu * nv)))


def _sentences(docs: Iterable[AnnotatedDocument]) -> Iterable[list[str]]:
    for doc in docs:
        current: list[str] = []
        sent = None
        for t in doc.tokens:
            if t.sentence_idx != sent:
                if current:
                    yield current
                current, sent = [], t.sentence_idx
            if t.is_word:
                current.append(t.lemma)
        if current:
            yield current


def cooccurrence_counts(
    docs: Sequence[AnnotatedDocument], window: int = 5, min_count: int = 5
) -> tuple[tuple[str, ...], sparse.csr_matrix]:
    """Symmetric word-word counts within ``window`` word positions of a sentence.

    Distances are measured over word tokens (punctuation dropped) before
    rare words are removed; pairs touching a word seen fewer than
    ``min_count`` times are discarded.
    """
    if window < 1 or min_count < 1:
        raise InvalidParameter("window and min_count must be >= 1")
    sentences = list(_sentences(docs))
    freq = Counter(w for s in sentences for w in s)
    vocab = tuple(sorted(w for w, c in freq.items() if c >= min_count))
    if not vocab:
        raise EmptyCorpus("no word reaches min_count")
    index = {w: i for i, w in enumerate(vocab)}
    rows, cols = [], []
    for sent in sentences:
        ids = np.array([index.get(w, -1) for w in sent], dtype=np.int64)
        for off in range(1, min(window, len(ids) - 1) + 1):
            a, b = ids[:-off], ids[off:]
            keep = (a >= 0) & (b >= 0)
            rows.append(a[keep])
            cols.append(b[keep])
    if rows:
        r = np.concatenate(rows)
        c = np.concatenate(cols)
    else:
        r = c = np.zeros(0, dtype=np.int64)
    n = len(vocab)
    data = np.ones(2 * len(r), dtype=np.float64)
    counts = sparse.coo_matrix((data, (np.concatenate([r, c]), np.concatenate([c, r]))), shape=(n, n)).tocsr()
    counts.sum_duplicates()
    return vocab, counts


def ppmi(counts: sparse.csr_matrix) -> sparse.csr_matrix:
    """max(0, log(#(w,c) * N / (#w * #c))) on the nonzero cells of ``counts``."""
    counts = counts.tocoo()
    total = counts.sum()
    row_sums = np.asarray(counts.sum(axis=1)).ravel()
    col_sums = np.asarray(counts.sum(axis=0)).ravel()
    with np.errstate(divide="ignore"):
        pmi = np.log(counts.data * total / (row_sums[counts.row] * col_sums[counts.col]))
    pmi = np.maximum(pmi, 0.0)
    out = sparse.csr_matrix((pmi, (counts.row, counts.col)), shape=counts.shape)
    out.eliminate_zeros()
    return out


def build_ppmi_space(docs: Sequence[AnnotatedDocument], window: int = 5, min_count: int = 5) -> EmbeddingSpace:
    """Count-based word vectors: each word's PPMI row over the context vocabulary."""
    if not docs:
        raise EmptyCorpus("no documents")
    vocab, counts = cooccurrence_counts(docs, window, min_count)
    if counts.nnz == 0:
        raise EmptyCorpus("no co-occurrences within the window")
    return EmbeddingSpace(vocab, ppmi(counts))


@dataclass(frozen=True)
class SimilarityProposal:
    candidate: str
    neighbor: str
    similarity: float
    associations: tuple[Association, ...]
    alternatives: tuple[tuple[str, float], ...] = ()

    def to_addition(self) -> Addition:
        return Addition(self.candidate, self.neighbor, self.similarity, self.associations)

    def to_json(self) -> dict:
        out = self.to_addition().to_json()
        out["neighbors"] = [{"lemma": w, "similarity": s} for w, s in self.alternatives]
        return out


def _normalized_rows(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(rows, axis=1)
    ok = norms > 0
    out = np.zeros_like(rows)
    out[ok] = rows[ok] / norms[ok, None]
    return out, ok


def propose_additions(
    space: EmbeddingSpace,
    lex: EmotionLexicon,
    candidates: Iterable[str],
    k: int = 5,
    min_sim: float = 0.7,
) -> tuple[list[SimilarityProposal], list[tuple[str, str]]]:
    """Suggest lexicon entries for ``candidates`` from their nearest lexicon words.

    For each candidate the ``k`` most similar words that are both in the
    lexicon and in ``space`` are ranked by cosine (ties by word), those
    under ``min_sim`` dropped, and the best survivor's associations copied.
    Returns ``(proposals, skipped)`` where ``skipped`` holds
    ``(candidate, reason)`` pairs.
    """
    if k < 1:
        raise InvalidParameter(f"k must be >= 1, got {k}")
    if not (-1.0 <= min_sim <= 1.0):
        raise InvalidParameter(f"min_sim must lie in [-1, 1], got {min_sim}")

    pool = sorted(w for w in lex.entries if lex.entries[w] and w in space)
    pool_rows, pool_ok = _normalized_rows(space._rows([space._index[w] for w in pool])) if pool else (None, None)

    proposals: list[SimilarityProposal] = []
    skipped: list[tuple[str, str]] = []
    for raw in candidates:
        cand = raw.strip().lower()
        if not cand:
            continue
        if cand not in space:
            skipped.append((cand, "not in embedding space"))
            continue
        vec = space.vector(cand)
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            skipped.append((cand, "zero vector"))
            continue
        if not pool:
            skipped.append((cand, "no lexicon word in embedding space"))
            continue
        sims = np.clip(pool_rows @ (vec / norm), -1.0, 1.0)
        ranked = sorted(
            (
                (-float(sims[i]), pool[i])
                for i in range(len(pool))
                if pool_ok[i] and pool[i] != cand
            )
        )[:k]
        kept = [(w, -s) for s, w in ranked if -s >= min_sim]
        if not kept:
            skipped.append((cand, f"no neighbor with similarity >= {min_sim}"))
            continue
        best, sim = kept[0]
        assoc = lex.entries[best]
        proposals.append(
            SimilarityProposal(
                candidate=cand,
                neighbor=best,
                similarity=sim,
                associations=tuple(Association(e, assoc[e]) for e in order_emotions(assoc) if e in assoc),
                alternatives=tuple(kept),
            )
        )
    return proposals, skipped
