"""Turn downloaded plain-text books into clean UTF-8 bodies with metadata."""

from __future__ import annotations

import csv
import logging
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import EncodingUndecodable

logger = logging.getLogger(__name__)

CANDIDATE_ENCODINGS = ("utf-8", "iso-8859-1", "iso-8859-15", "windows-1252")

# 0x80-0x9F decode to C1 controls under the ISO-8859 codecs; those positions
# have no graphic character in the code charts, so text containing them is
# treated as a failed decode.
_C1_CONTROLS = re.compile("[\u0080-\u009f]")
_LEGACY = {"iso-8859-1", "iso-8859-15", "latin-1", "latin1", "iso8859-1", "iso8859-15"}

START_MARKER = "*** START OF"
END_MARKER = "*** END OF"

TRANSLATION_PREFIXES = ("suomenta", "suomennet", "käänn", "kääntäj")
TRANSLATION_WINDOW = 10
HEADER_WINDOW = 15

_WORD = re.compile(r"[^\W\d_]+")
_YEAR = re.compile(r"(?<![\d.,])(\d{3,4})(?![\d.,]?\d)")
_AUTHOR_LABEL = r"(?:kirj\.|(?:kirjoittanut|kirjoittaneet|kirjoitti|kirjoittaja|tekijä|author)\b:?)"
_AUTHOR_INLINE = re.compile(rf"^{_AUTHOR_LABEL}\s*(?P<name>\S.*)$", re.IGNORECASE)
_AUTHOR_ALONE = re.compile(rf"^{_AUTHOR_LABEL}$", re.IGNORECASE)
_TITLE_LABEL = re.compile(r"^(?:title|nimeke|nimi)\s*:\s*(?P<title>\S.*)$", re.IGNORECASE)


@dataclass(frozen=True)
class RawBook:
    source_id: str
    data: bytes
    declared_encoding: str | None = None

    def __post_init__(self):
        if not self.data:
            raise ValueError(f"{self.source_id}: empty file")


@dataclass(frozen=True)
class Metadata:
    title: str
    source_id: str
    author: str | None = None
    year: int | None = None
    is_translation: bool = False

    def __post_init__(self):
        if not self.title:
            raise ValueError("title must be non-empty")
        if self.year is not None and not (100 <= self.year <= 9999):
            raise ValueError(f"year {self.year} is not a 3-4 digit positive integer")

    @classmethod
    def placeholder(cls, source_id: str) -> "Metadata":
        return cls(title=source_id, source_id=source_id)


@dataclass
class CleanDocument:
    metadata: Metadata
    body: str
    encoding_used: str = "utf-8"
    warnings: list[str] = field(default_factory=list)


def _decodes_cleanly(data: bytes, encoding: str) -> str | None:
    try:
        text = data.decode(encoding)
    except (UnicodeDecodeError, LookupError):
        return None
    if "\ufffd" in text:
        return None
    if encoding.lower() in _LEGACY and _C1_CONTROLS.search(text):
        return None
    return text


def normalize_encoding(raw: RawBook) -> tuple[str, str]:
    """Decode ``raw`` to text, returning ``(text, encoding_used)``.

    Candidates are tried in :data:`CANDIDATE_ENCODINGS` order, preceded by the
    declared encoding when the catalog provides one. A candidate wins when it
    decodes strictly and the result holds neither U+FFFD nor C1 control
    characters (the latter only for the ISO-8859 family).
    """
    tried: list[str] = []
    candidates = list(CANDIDATE_ENCODINGS)
    if raw.declared_encoding:
        declared = raw.declared_encoding.strip().lower()
        if declared in candidates:
            candidates.remove(declared)
        candidates.insert(0, declared)
    for enc in candidates:
        tried.append(enc)
        text = _decodes_cleanly(raw.data, enc)
        if text is not None:
            if text.startswith("\ufeff"):
                text = text[1:]
            return text.replace("\r\n", "\n").replace("\r", "\n"), enc
    raise EncodingUndecodable(raw.source_id, tuple(tried))


def _is_start(line: str) -> bool:
    return line.lstrip().startswith(START_MARKER)


def _is_end(line: str) -> bool:
    return line.lstrip().startswith(END_MARKER)


def split_boilerplate(text: str) -> tuple[str, str, bool]:
    """Return ``(preamble, body, stripped)``; see :func:`strip_boilerplate`."""
    lines = text.split("\n")
    start = next((i for i, ln in enumerate(lines) if _is_start(ln)), None)
    lo = 0 if start is None else start + 1
    end = next((i for i in range(lo, len(lines)) if _is_end(lines[i])), None)
    if start is None and end is None:
        return "", text, False
    hi = len(lines) if end is None else end
    kept = [ln for ln in lines[lo:hi] if not (_is_start(ln) or _is_end(ln))]
    preamble = "\n".join(lines[:start]) if start is not None else ""
    return preamble, "\n".join(kept).strip("\n"), True


def strip_boilerplate(text: str) -> tuple[str, bool]:
    """Cut the Project Gutenberg header and licence off ``text``.

    The body starts after the first ``*** START OF`` line and stops before the
    next ``*** END OF`` line. Stray marker lines left inside the body are
    dropped so that a second pass finds nothing to strip.
    """
    _, body, stripped = split_boilerplate(text)
    return body, stripped


def _nonempty_lines(text: str, limit: int) -> list[str]:
    out = []
    for line in text.split("\n"):
        line = line.strip()
        if line:
            out.append(line)
            if len(out) == limit:
                break
    return out


def extract_metadata(body: str, source_id: str, preamble: str = "") -> Metadata:
    """Best-effort title/author/year from labelled lines near the top of ``body``.

    Recognised labels: ``Kirj.``/``Kirjoittanut``/``Tekijä:``/``Author:`` for
    the author (inline or on the following line), ``Title:``/``Nimi:`` for the
    title. Gutenberg ``Title:``/``Author:`` lines in ``preamble`` fill whatever
    the body labels leave open; failing that, the first header line above the
    author line is the title. The year is the first standalone 3-4 digit
    number in the header window. Nothing is guessed beyond that.
    """
    lines = _nonempty_lines(body, HEADER_WINDOW)
    title = author = None
    year = None
    author_line = None
    for i, line in enumerate(lines):
        if title is None and (m := _TITLE_LABEL.match(line)):
            title = m.group("title").strip()
            continue
        if author is None:
            if m := _AUTHOR_INLINE.match(line):
                author = m.group("name").strip().rstrip(".,")
                author_line = i
            elif _AUTHOR_ALONE.match(line) and i + 1 < len(lines):
                author = lines[i + 1].strip().rstrip(".,")
                author_line = i
    for line in lines:
        if len(line) <= 80 and (m := _YEAR.search(line)):
            year = int(m.group(1))
            break
    if preamble and (title is None or author is None):
        for line in _nonempty_lines(preamble, 60):
            if title is None and (m := re.match(r"^Title:\s*(\S.*)$", line)):
                title = m.group(1).strip()
            elif author is None and (m := re.match(r"^Author:\s*(\S.*)$", line)):
                author = m.group(1).strip()
    if title is None and author_line is not None and author_line > 0:
        candidate = next((ln for ln in lines[:author_line] if not _YEAR.search(ln)), None)
        if candidate is not None and len(candidate) <= 80:
            title = candidate

    if year is not None and not (100 <= year <= 9999):
        year = None
    return Metadata(
        title=title or source_id,
        source_id=source_id,
        author=author or None,
        year=year,
        is_translation=detect_translation(body),
    )


def detect_translation(body: str) -> bool:
    """True if a translator term occurs within the first ten non-empty lines."""
    for line in _nonempty_lines(body, TRANSLATION_WINDOW):
        line = unicodedata.normalize("NFC", line).lower()
        for word in _WORD.findall(line):
            if word.startswith(TRANSLATION_PREFIXES):
                return True
    return False


def clean_book(raw: RawBook) -> CleanDocument:
    """Full ingest of one book. Raises :class:`EncodingUndecodable`."""
    text, encoding = normalize_encoding(raw)
    warnings = []
    if encoding != "utf-8":
        warnings.append(f"decoded as {encoding}")
    text = unicodedata.normalize("NFC", text)
    preamble, body, stripped = split_boilerplate(text)
    if not stripped:
        warnings.append("no boilerplate markers found")
    meta = extract_metadata(body, raw.source_id, preamble=preamble)
    return CleanDocument(metadata=meta, body=body, encoding_used=encoding, warnings=warnings)


def read_catalog(path: str | Path) -> dict[str, str]:
    """Read a ``source_id<TAB>declared_encoding`` catalog."""
    out = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh, delimiter="\t"):
            if not row or row[0].startswith("#") or len(row) < 2:
                continue
            if row[0] == "source_id":
                continue
            out[row[0].strip()] = row[1].strip()
    return out


def iter_raw_books(corpus_dir: str | Path, catalog: dict[str, str] | None = None) -> Iterator[RawBook | tuple[str, str]]:
    """Yield a RawBook per ``.txt`` file, or ``(source_id, error)`` for empty files."""
    catalog = catalog or {}
    for path in sorted(Path(corpus_dir).glob("*.txt")):
        data = path.read_bytes()
        if not data:
            yield path.stem, "empty file"
            continue
        yield RawBook(path.stem, data, catalog.get(path.stem))


@dataclass
class IngestRecord:
    source_id: str
    title: str | None = None
    author: str | None = None
    year: int | None = None
    is_translation: bool | None = None
    encoding_used: str | None = None
    skipped: bool = False
    error: str | None = None

    def to_json(self) -> dict:
        return {
            "source_id": self.source_id,
            "title": self.title,
            "author": self.author,
            "year": self.year,
            "is_translation": self.is_translation,
            "encoding_used": self.encoding_used,
            "skipped": self.skipped,
            "error": self.error,
        }


def ingest_corpus(books: Iterable[RawBook | tuple[str, str]]) -> tuple[list[CleanDocument], list[IngestRecord]]:
    """Clean every book; undecodable ones are recorded rather than raised."""
    docs: list[CleanDocument] = []
    records: list[IngestRecord] = []
    for item in books:
        if isinstance(item, tuple):
            records.append(IngestRecord(item[0], skipped=True, error=item[1]))
            continue
        try:
            doc = clean_book(item)
        except EncodingUndecodable as exc:
            logger.warning("skipping %s", exc)
            records.append(IngestRecord(item.source_id, skipped=True, error=str(exc)))
            continue
        m = doc.metadata
        docs.append(doc)
        records.append(
            IngestRecord(m.source_id, m.title, m.author, m.year, m.is_translation, doc.encoding_used)
        )
    return docs, records
