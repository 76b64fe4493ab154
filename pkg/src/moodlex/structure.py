"""Token streams, chapter detection and the two segmentation strategies."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, replace
from typing import Iterable

from .errors import EmptyDocument, InvalidParameter, MalformedLine
from .ingest import Metadata


class Strategy(str, enum.Enum):
    FIRST_PARAGRAPHS = "first-paragraphs"
    CHAPTER_OPENINGS = "chapter-openings"

    def __str__(self):
        return self.value


@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    lemma: str
    is_word: bool
    sentence_idx: int
    paragraph_idx: int
    chapter_idx: int = 0


@dataclass(frozen=True)
class AnnotatedDocument:
    metadata: Metadata
    tokens: tuple[Token, ...]
    paragraph_texts: tuple[str, ...] = ()
    headings: frozenset[int] = frozenset()
    front_matter: frozenset[int] = frozenset()
    warnings: tuple[str, ...] = ()

    @property
    def excluded(self) -> frozenset[int]:
        """Paragraphs that never enter a segment (headings and front matter)."""
        return self.headings | self.front_matter

    @property
    def doc_id(self) -> str:
        return self.metadata.source_id

    @property
    def chapter_count(self) -> int:
        if not self.tokens:
            return 0
        return self.tokens[-1].chapter_idx + 1

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "chapter_count": self.chapter_count,
            "headings": sorted(self.headings),
            "front_matter": sorted(self.front_matter),
            "tokens": [
                [t.surface, t.lemma, t.is_word, t.sentence_idx, t.paragraph_idx, t.chapter_idx]
                for t in self.tokens
            ],
        }


@dataclass(frozen=True)
class Segment:
    doc_id: str
    strategy: Strategy
    tokens: tuple[Token, ...]
    chapter_idx: int | None = None

    def __post_init__(self):
        if not self.tokens:
            raise EmptyDocument(f"{self.doc_id}: empty segment")


def _normalize_lemma(lemma: str, surface: str) -> str:
    if lemma == "_" or not lemma:
        lemma = surface
    if len(lemma) > 1:
        # compound boundary marks, e.g. keinu#tuoli
        lemma = lemma.replace("#", "")
    return lemma.lower()


def parse_conllu(lines: Iterable[str], metadata: Metadata, source: str | None = None) -> AnnotatedDocument:
    """Read a CoNLL-U stream into an :class:`AnnotatedDocument`.

    ``# newpar`` (and ``# newdoc``) start a new paragraph, blank lines end a
    sentence. Multiword range lines and empty nodes are skipped. Chapter
    indices are left at 0; run :func:`chapterize` afterwards.
    """
    tokens: list[Token] = []
    par_texts: list[list[str]] = [[]]
    par_surfaces: list[list[str]] = [[]]
    sent = par = 0
    sent_has_tokens = par_has_tokens = False
    pending_text: str | None = None

    for line_no, line in enumerate(lines, start=1):
        line = line.rstrip("\n").rstrip("\r")
        if not line.strip():
            if sent_has_tokens:
                sent += 1
                sent_has_tokens = False
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("newpar") or body.startswith("newdoc"):
                if par_has_tokens:
                    par += 1
                    par_texts.append([])
                    par_surfaces.append([])
                    par_has_tokens = False
            elif body.startswith("text") and "=" in body:
                key, _, value = body.partition("=")
                if key.strip() == "text":
                    pending_text = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise MalformedLine(line_no, f"expected 10 columns, got {len(cols)}", source)
        tok_id = cols[0]
        if "-" in tok_id or "." in tok_id:
            continue
        if pending_text is not None:
            par_texts[par].append(pending_text)
            pending_text = None
        surface, lemma, upos = cols[1], cols[2], cols[3]
        tokens.append(
            Token(
                surface=surface,
                lemma=_normalize_lemma(lemma, surface),
                is_word=upos != "PUNCT",
                sentence_idx=sent,
                paragraph_idx=par,
            )
        )
        par_surfaces[par].append(surface)
        sent_has_tokens = par_has_tokens = True

    if not tokens:
        return AnnotatedDocument(metadata, (), (), warnings=("no tokens",))
    texts = tuple(
        " ".join(t) if t else " ".join(s) for t, s in zip(par_texts, par_surfaces)
    )
    return AnnotatedDocument(metadata, tuple(tokens), texts)


_PUNCT_EDGE = re.compile(r"^(\W*?)([\w].*?[\w]|[\w])?(\W*)$", re.DOTALL)
_SENTENCE_END = set(".!?")


def _split_chunk(chunk: str) -> tuple[str, str, str]:
    m = _PUNCT_EDGE.match(chunk)
    if m is None or m.group(2) is None:
        return chunk, "", ""
    return m.group(1), m.group(2), m.group(3)


def fallback_tokenize(body: str, metadata: Metadata | None = None) -> AnnotatedDocument:
    """Whitespace tokenizer used when no CoNLL-U annotation is available.

    Paragraphs are blank-line separated blocks; a sentence ends after a
    chunk whose trailing punctuation contains ``.``, ``!`` or ``?``. Leading and
    trailing punctuation characters become separate non-word tokens. Lemmas
    are the lowercased surface forms.
    """
    metadata = metadata or Metadata.placeholder("document")
    paragraphs = [p for p in re.split(r"\n[ \t]*\n", body.strip("\n")) if p.strip()]
    if not paragraphs:
        return AnnotatedDocument(metadata, (), (), warnings=("empty body",))

    tokens: list[Token] = []
    sent = 0
    for par_idx, para in enumerate(paragraphs):
        sent_open = False
        for chunk in para.split():
            lead, word, trail = _split_chunk(chunk)
            for ch in lead:
                tokens.append(Token(ch, ch, False, sent, par_idx))
                sent_open = True
            if word:
                tokens.append(Token(word, word.lower(), True, sent, par_idx))
                sent_open = True
            for ch in trail:
                tokens.append(Token(ch, ch, False, sent, par_idx))
                sent_open = True
            if _SENTENCE_END.intersection(trail):
                sent += 1
                sent_open = False
        # paragraphs always close a sentence
        if sent_open:
            sent += 1
    texts = tuple(p.strip() for p in paragraphs)
    return AnnotatedDocument(metadata, tuple(tokens), texts)


MAX_HEADING_CHARS = 60
FRONT_MATTER_MAX_WORDS = 12
_ROMAN = re.compile(r"^(?=[IVXL])(XL|X{0,3})(IX|IV|V?I{0,3})\.?$")
_LUKU = re.compile(r"^LUKU(\s+(\d+|[IVXL]+))?\.?$", re.IGNORECASE)
_NUM_LUKU = re.compile(r"^\d+\.\s*LUKU\.?$", re.IGNORECASE)
_ORDINAL_LUKU = re.compile(r"^\w+?(s|nen|toista)\s+luku\.?$", re.IGNORECASE)


def is_heading(text: str) -> bool:
    """Whether a paragraph's text looks like a chapter heading."""
    text = text.strip()
    if not text or "\n" in text or len(text) > MAX_HEADING_CHARS:
        return False
    if _ROMAN.match(text) or _LUKU.match(text) or _NUM_LUKU.match(text) or _ORDINAL_LUKU.match(text):
        return True
    has_letter = any(c.isalpha() for c in text)
    return has_letter and text == text.upper() and len(text.split()) <= 5


def _paragraph_count(doc: AnnotatedDocument) -> int:
    return doc.tokens[-1].paragraph_idx + 1 if doc.tokens else 0


def chapterize(doc: AnnotatedDocument, body: str | None = None) -> AnnotatedDocument:
    """Assign chapter indices from heading paragraphs.

    Heading text is taken from ``body``'s blank-line paragraphs when their
    count matches the document's, otherwise from the stored paragraph texts.
    A heading directly following another heading continues the same chapter.

    Front matter: when the first long paragraph (more than
    ``FRONT_MATTER_MAX_WORDS`` words) is preceded by a heading, the short
    paragraphs before that heading (title page, author and year lines) are
    marked as front matter and, together with any earlier headings, folded
    into chapter 0. Without headings there is no front matter.
    """
    n_par = _paragraph_count(doc)
    texts = list(doc.paragraph_texts)
    if body is not None:
        body_pars = [p for p in re.split(r"\n[ \t]*\n", body.strip("\n")) if p.strip()]
        if len(body_pars) == n_par:
            texts = body_pars
    heads = frozenset(i for i in range(min(n_par, len(texts))) if is_heading(texts[i]))

    words_in = [0] * n_par
    present = set()
    for t in doc.tokens:
        present.add(t.paragraph_idx)
        words_in[t.paragraph_idx] += t.is_word
    first_long = next(
        (p for p in range(n_par) if p in present and p not in heads and words_in[p] > FRONT_MATTER_MAX_WORDS),
        None,
    )
    anchor = None
    if first_long is not None:
        anchor = max((h for h in heads if h < first_long), default=None)
    front = frozenset(p for p in range(anchor) if p not in heads and p in present) if anchor else frozenset()

    chapter_of: dict[int, int] = {}
    chapter = -1
    prev_heading = False
    for p in range(n_par):
        if p not in present:
            continue
        if anchor is not None and p < anchor:
            chapter_of[p] = 0
            continue
        if p in heads:
            if not prev_heading:
                chapter += 1
            prev_heading = True
        else:
            if chapter < 0:
                chapter = 0
            prev_heading = False
        chapter_of[p] = chapter
    tokens = tuple(
        t if t.chapter_idx == chapter_of[t.paragraph_idx] else replace(t, chapter_idx=chapter_of[t.paragraph_idx])
        for t in doc.tokens
    )
    return replace(doc, tokens=tokens, headings=heads, front_matter=front)


def _check_positive(name: str, value: int) -> None:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise InvalidParameter(f"{name} must be a positive integer, got {value!r}")


def segment_first_paragraphs(doc: AnnotatedDocument, n: int = 3) -> Segment:
    """Tokens of the first ``n`` prose paragraphs of chapter 0.

    Headings and front matter are skipped.
    """
    _check_positive("n", n)
    if not doc.tokens:
        raise EmptyDocument(f"{doc.doc_id}: no tokens")
    chosen: list[int] = []
    out: list[Token] = []
    excluded = doc.excluded
    for t in doc.tokens:
        if t.chapter_idx != 0:
            break
        if t.paragraph_idx in excluded:
            continue
        if not chosen or chosen[-1] != t.paragraph_idx:
            if len(chosen) == n:
                break
            chosen.append(t.paragraph_idx)
        out.append(t)
    if not out:
        raise EmptyDocument(f"{doc.doc_id}: chapter 0 has no prose paragraphs")
    return Segment(doc.doc_id, Strategy.FIRST_PARAGRAPHS, tuple(out))


def chapter_tokens(doc: AnnotatedDocument) -> list[list[Token]]:
    """Prose tokens (headings and front matter dropped) grouped by chapter (list index == chapter_idx)."""
    groups: list[list[Token]] = [[] for _ in range(doc.chapter_count)]
    excluded = doc.excluded
    for t in doc.tokens:
        if t.paragraph_idx not in excluded:
            groups[t.chapter_idx].append(t)
    return groups


def segment_chapter_openings(doc: AnnotatedDocument, k: int = 200) -> list[Segment]:
    """The first ``k`` tokens (punctuation included) of every chapter.

    Chapters consisting only of heading paragraphs yield no segment.
    """
    _check_positive("k", k)
    if not doc.tokens:
        raise EmptyDocument(f"{doc.doc_id}: no tokens")
    segments = [
        Segment(doc.doc_id, Strategy.CHAPTER_OPENINGS, tuple(toks[:k]), chapter_idx=idx)
        for idx, toks in enumerate(chapter_tokens(doc))
        if toks
    ]
    if not segments:
        raise EmptyDocument(f"{doc.doc_id}: no prose tokens")
    return segments
