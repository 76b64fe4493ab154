"""Per-1000-token emotion profiles for segments, documents and corpora."""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .errors import EmptyDocument, EmptySegment, MismatchedDocuments
from .lexicon import EmotionLexicon, emotion_proportions, order_emotions
from .structure import (
    AnnotatedDocument,
    Segment,
    Strategy,
    segment_chapter_openings,
    segment_first_paragraphs,
)

logger = logging.getLogger(__name__)

PER = 1000.0
MEAN = "mean"


class TraceRow(NamedTuple):
    position: int
    lemma: str
    emotion: str
    intensity: float


@dataclass(frozen=True)
class EmotionProfile:
    doc_id: str
    strategy: Strategy
    scores: dict[str, float]
    token_count: int
    matched_count: int
    chapter_idx: int | str | None = None  # int per chapter, MEAN for the chapter average

    def __post_init__(self):
        if self.token_count < 1:
            raise ValueError("token_count must be >= 1")
        if self.matched_count > self.token_count:
            raise ValueError("matched_count exceeds token_count")

    @property
    def sort_key(self):
        c = self.chapter_idx
        return (self.doc_id, 0 if c is None else 1 if c != MEAN else 2, c if isinstance(c, int) else 0)

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "strategy": str(self.strategy),
            "chapter_idx": self.chapter_idx,
            "scores": dict(self.scores),
            "token_count": self.token_count,
            "matched_count": self.matched_count,
        }


def score_segment(
    seg: Segment, lex: EmotionLexicon, emotions: Sequence[str] | None = None
) -> tuple[EmotionProfile, list[TraceRow]]:
    """Sum intensities of matched word tokens, scaled to per 1000 word tokens.

    Only word tokens are looked up and counted in the denominator. A token
    whose lemma carries several emotions contributes to each of them.
    """
    names = tuple(emotions) if emotions is not None else lex.emotions
    acc = dict.fromkeys(names, 0.0)
    entries = lex.entries
    trace: list[TraceRow] = []
    n_words = matched = 0
    for pos, tok in enumerate(seg.tokens):
        if not tok.is_word:
            continue
        n_words += 1
        assoc = entries.get(tok.lemma)
        if not assoc:
            continue
        matched += 1
        for emotion, value in assoc.items():
            if emotion in acc:
                acc[emotion] += value
                trace.append(TraceRow(pos, tok.lemma, emotion, value))
    if n_words == 0:
        raise EmptySegment(f"{seg.doc_id}: segment has no word tokens")
    scores = {e: PER * a / n_words for e, a in acc.items()}
    profile = EmotionProfile(seg.doc_id, seg.strategy, scores, n_words, matched, seg.chapter_idx)
    return profile, trace


def mean_profile(profiles: Sequence[EmotionProfile]) -> EmotionProfile:
    """Unweighted mean of already-normalized chapter profiles."""
    first = profiles[0]
    names = tuple(first.scores)
    scores = {e: sum(p.scores[e] for p in profiles) / len(profiles) for e in names}
    return EmotionProfile(
        first.doc_id,
        first.strategy,
        scores,
        sum(p.token_count for p in profiles),
        sum(p.matched_count for p in profiles),
        MEAN,
    )


def segment_document(doc: AnnotatedDocument, strategy: Strategy, n: int = 3, k: int = 200) -> list[Segment]:
    if Strategy(strategy) is Strategy.FIRST_PARAGRAPHS:
        return [segment_first_paragraphs(doc, n)]
    return segment_chapter_openings(doc, k)


def score_document(
    doc: AnnotatedDocument,
    lex: EmotionLexicon,
    strategy: Strategy,
    n: int = 3,
    k: int = 200,
    emotions: Sequence[str] | None = None,
    with_trace: bool = False,
) -> tuple[list[EmotionProfile], list[tuple[str, int | None, TraceRow]]]:
    strategy = Strategy(strategy)
    profiles: list[EmotionProfile] = []
    traces = []
    for seg in segment_document(doc, strategy, n, k):
        try:
            prof, trace = score_segment(seg, lex, emotions)
        except EmptySegment:
            # punctuation-only chapter opening
            continue
        profiles.append(prof)
        if with_trace:
            traces.extend((doc.doc_id, seg.chapter_idx, row) for row in trace)
    if not profiles:
        raise EmptySegment(f"{doc.doc_id}: no scorable segment")
    if strategy is Strategy.CHAPTER_OPENINGS:
        profiles.append(mean_profile(profiles))
    return profiles, traces


@dataclass
class CorpusScores:
    profiles: list[EmotionProfile]
    failures: dict[str, str] = field(default_factory=dict)
    trace: list[tuple[str, int | None, TraceRow]] = field(default_factory=list)


def _score_one(args):
    doc, lex, strategy, n, k, emotions, with_trace = args
    try:
        return doc.doc_id, score_document(doc, lex, strategy, n, k, emotions, with_trace), None
    except (EmptyDocument, EmptySegment) as exc:
        return doc.doc_id, None, str(exc)


def score_corpus(
    docs: Sequence[AnnotatedDocument],
    lex: EmotionLexicon,
    strategy: Strategy = Strategy.FIRST_PARAGRAPHS,
    n: int = 3,
    k: int = 200,
    jobs: int = 1,
    with_trace: bool = False,
) -> CorpusScores:
    """Segment and score every document; failures are collected, not raised.

    With ``jobs > 1`` documents are scored in worker processes; results are
    reassembled in ``(doc_id, chapter_idx)`` order so output is identical.
    """
    emotions = lex.emotions
    work = [(d, lex, Strategy(strategy), n, k, emotions, with_trace) for d in docs]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_score_one, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        results = [_score_one(w) for w in work]
    out = CorpusScores([])
    for doc_id, res, err in results:
        if err is not None:
            logger.warning("%s: %s", doc_id, err)
            out.failures[doc_id] = err
            continue
        profiles, trace = res
        out.profiles.extend(profiles)
        out.trace.extend(trace)
    out.profiles.sort(key=lambda p: (p.sort_key, str(p.strategy)))
    out.trace.sort(key=lambda r: (r[0], -1 if r[1] is None else r[1], r[2].position, r[2].emotion))
    return out


# -- comparison ------------------------------------------------------------


def _proportions(scores: dict[str, float], names: Sequence[str]) -> list[float] | None:
    total = sum(scores.get(e, 0.0) for e in names)
    if total <= 0:
        return None
    return [scores.get(e, 0.0) / total for e in names]


def l1_to_lexicon(scores: dict[str, float], lexicon_props: dict[str, float]) -> float | None:
    names = tuple(lexicon_props)
    props = _proportions(scores, names)
    if props is None:
        return None
    return sum(abs(p - lexicon_props[e]) for p, e in zip(props, names))


@dataclass
class DivergenceReport:
    strategy_a: str
    strategy_b: str
    per_document: list[tuple[str, float | None, float | None]]
    mean_a: float | None
    mean_b: float | None

    def to_json(self) -> dict:
        return {
            "strategy_a": self.strategy_a,
            "strategy_b": self.strategy_b,
            "mean_a": self.mean_a,
            "mean_b": self.mean_b,
            "per_document": [{"doc_id": d, "distance_a": a, "distance_b": b} for d, a, b in self.per_document],
        }


def _document_profiles(profiles: Iterable[EmotionProfile]) -> dict[str, EmotionProfile]:
    """One profile per document: the single profile, or the chapter mean."""
    out: dict[str, EmotionProfile] = {}
    for p in profiles:
        if p.chapter_idx is None or p.chapter_idx == MEAN:
            out[p.doc_id] = p
    return out


def _mean(values):
    vals = [v for v in values if v is not None]
    return sum(vals) / len(vals) if vals else None


def compare_strategies(
    profiles_a: Iterable[EmotionProfile], profiles_b: Iterable[EmotionProfile], lex: EmotionLexicon
) -> DivergenceReport:
    """L1 distance of each document's emotion proportions to the lexicon's."""
    profiles_a, profiles_b = list(profiles_a), list(profiles_b)
    docs_a, docs_b = _document_profiles(profiles_a), _document_profiles(profiles_b)
    if set(docs_a) != set(docs_b):
        diff = sorted(set(docs_a) ^ set(docs_b))
        raise MismatchedDocuments(f"profile sets differ on documents: {', '.join(diff)}")
    names = order_emotions(
        set(lex.emotions) | {e for p in profiles_a + profiles_b for e in p.scores}
    )
    lex_props = emotion_proportions(lex, names)
    rows = []
    for doc_id in sorted(docs_a):
        rows.append(
            (
                doc_id,
                l1_to_lexicon(docs_a[doc_id].scores, lex_props),
                l1_to_lexicon(docs_b[doc_id].scores, lex_props),
            )
        )

    def label(ps):
        return str(ps[0].strategy) if ps else ""

    return DivergenceReport(
        label(profiles_a),
        label(profiles_b),
        rows,
        _mean(r[1] for r in rows),
        _mean(r[2] for r in rows),
    )


# -- serialization ---------------------------------------------------------

SCORE_COLUMNS_HEAD = ("doc_id", "strategy", "chapter_idx")
SCORE_COLUMNS_TAIL = ("token_count", "matched_count")


def scores_csv(profiles: Sequence[EmotionProfile], emotions: Sequence[str]) -> str:
    """CSV table with scores rounded to two decimals."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCORE_COLUMNS_HEAD + tuple(emotions) + SCORE_COLUMNS_TAIL)
    for p in profiles:
        chap = "" if p.chapter_idx is None else p.chapter_idx
        w.writerow(
            [p.doc_id, str(p.strategy), chap]
            + [f"{p.scores.get(e, 0.0):.2f}" for e in emotions]
            + [p.token_count, p.matched_count]
        )
    return buf.getvalue()


def scores_json(profiles: Sequence[EmotionProfile], emotions: Sequence[str]) -> str:
    payload = {
        "units": "intensity sum per 1000 word tokens",
        "emotions": list(emotions),
        "profiles": [p.to_json() for p in profiles],
    }
    return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=False) + "\n"


def profiles_from_json(data: dict) -> list[EmotionProfile]:
    return [
        EmotionProfile(
            p["doc_id"],
            Strategy(p["strategy"]),
            dict(p["scores"]),
            int(p["token_count"]),
            int(p["matched_count"]),
            p["chapter_idx"],
        )
        for p in data["profiles"]
    ]


def trace_tsv(trace: Sequence[tuple[str, int | None, TraceRow]]) -> str:
    lines = ["doc_id\tchapter_idx\tposition\tlemma\temotion\tintensity"]
    for doc_id, chap, row in trace:
        lines.append(
            f"{doc_id}\t{'' if chap is None else chap}\t{row.position}\t{row.lemma}\t{row.emotion}\t{row.intensity!r}"
        )
    return "\n".join(lines) + "\n"
