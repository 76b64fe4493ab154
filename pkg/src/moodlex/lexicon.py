"""Emotion-intensity lexicons: loading, patching, co-occurrence analysis.

File format is the NRC/FEIL tab-separated layout, one association per line::

    word<TAB>emotion<TAB>intensity

Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import hashlib
import io
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .errors import IntensityOutOfRange, InvalidPatch, MalformedLine

logger = logging.getLogger(__name__)

CANONICAL_EMOTIONS = ("anger", "anticipation", "disgust", "fear", "joy", "sadness", "trust")


class Association(NamedTuple):
    emotion: str
    intensity: float


def order_emotions(labels: Iterable[str]) -> tuple[str, ...]:
    """The seven canonical emotions followed by any other labels, alphabetically."""
    extras = sorted(set(labels) - set(CANONICAL_EMOTIONS))
    return CANONICAL_EMOTIONS + tuple(extras)


@dataclass(frozen=True, eq=False)
class EmotionLexicon:
    """Immutable lemma -> {emotion: intensity} map.

    ``entries`` must not be mutated after construction; all operations that
    change the lexicon return a new instance.
    """

    entries: dict[str, dict[str, float]]
    version_tag: str = ""
    warnings: tuple[str, ...] = field(default=(), repr=False)

    def __eq__(self, other):
        if not isinstance(other, EmotionLexicon):
            return NotImplemented
        return self.version_tag == other.version_tag and self.entries == other.entries

    __hash__ = None  # type: ignore[assignment]

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, lemma: str) -> bool:
        return lemma.lower() in self.entries

    @property
    def emotions(self) -> tuple[str, ...]:
        return order_emotions(e for assoc in self.entries.values() for e in assoc)

    def lookup(self, lemma: str) -> frozenset[Association]:
        """Associations of ``lemma`` (case-insensitive); empty when absent."""
        assoc = self.entries.get(lemma.lower())
        if not assoc:
            return frozenset()
        return frozenset(Association(e, v) for e, v in assoc.items())

    def words_with(self, emotion: str) -> set[str]:
        return {w for w, assoc in self.entries.items() if emotion in assoc}

    def association_count(self) -> int:
        return sum(len(a) for a in self.entries.values())

    def iter_rows(self):
        for word in sorted(self.entries):
            assoc = self.entries[word]
            for emotion in order_emotions(assoc):
                if emotion in assoc:
                    yield word, emotion, assoc[emotion]

    def dumps(self) -> str:
        buf = io.StringIO()
        if self.version_tag:
            buf.write(f"# version: {self.version_tag}\n")
        for word, emotion, value in self.iter_rows():
            buf.write(f"{word}\t{emotion}\t{value!r}\n")
        return buf.getvalue()

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")


def _parse_float(text: str) -> float | None:
    try:
        return float(text)
    except ValueError:
        return None


def load_lexicon(lines: Iterable[str], version_tag: str = "", source: str | None = None) -> EmotionLexicon:
    """Parse lexicon lines into an :class:`EmotionLexicon`.

    Words and labels are lowercased. A repeated ``(word, emotion)`` pair keeps
    the last value. Multiword entries are skipped. Files that put the score in
    the second column (``word<TAB>score<TAB>emotion``, as some NRC releases do)
    are accepted, and a leading column-name row is ignored.

    Raises :class:`MalformedLine` and :class:`IntensityOutOfRange`.
    """
    entries: dict[str, dict[str, float]] = {}
    warnings: list[str] = []
    seen_data = False
    where = source or "<lexicon>"
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = [c.strip() for c in line.split("\t")]
        if len(cols) != 3 or not cols[0]:
            raise MalformedLine(line_no, f"expected 3 tab-separated columns, got {len(cols)}", source)
        word, second, third = cols
        value = _parse_float(third)
        emotion = second
        if value is None and (swapped := _parse_float(second)) is not None:
            value, emotion = swapped, third
        if value is None:
            if not seen_data:
                seen_data = True
                warnings.append(f"{where}:{line_no}: skipped header row")
                continue
            raise MalformedLine(line_no, "no numeric intensity", source)
        seen_data = True
        if not (0.0 <= value <= 1.0):
            raise IntensityOutOfRange(line_no, value, source)
        word = word.lower()
        emotion = emotion.lower()
        if not emotion:
            raise MalformedLine(line_no, "empty emotion label", source)
        if any(c.isspace() for c in word):
            warnings.append(f"{where}:{line_no}: multiword entry {word!r} skipped")
            continue
        assoc = entries.setdefault(word, {})
        if emotion in assoc:
            warnings.append(f"{where}:{line_no}: duplicate ({word}, {emotion}); last value wins")
        assoc[emotion] = value
    for w in warnings:
        logger.debug(w)
    return EmotionLexicon(entries, version_tag, tuple(warnings))


def read_lexicon(path: str | Path, version_tag: str | None = None) -> EmotionLexicon:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        return load_lexicon(fh, version_tag if version_tag is not None else path.stem, source=str(path))


def validate_lexicon(lex: EmotionLexicon) -> None:
    """Raise ``ValueError`` if any lexicon invariant is broken."""
    for word, assoc in lex.entries.items():
        if word != word.lower() or not word:
            raise ValueError(f"lemma {word!r} is not lowercased")
        for emotion, value in assoc.items():
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{word}/{emotion}: intensity {value} outside [0, 1]")


@dataclass(frozen=True)
class Addition:
    lemma: str
    source_lemma: str
    similarity: float
    associations: tuple[Association, ...]

    def to_json(self) -> dict:
        return {
            "lemma": self.lemma,
            "source_lemma": self.source_lemma,
            "similarity": self.similarity,
            "associations": [{"emotion": a.emotion, "intensity": a.intensity} for a in self.associations],
        }


@dataclass(frozen=True)
class LexiconPatch:
    removals: tuple[str, ...] = ()
    additions: tuple[Addition, ...] = ()

    def __post_init__(self):
        removed = {w.lower() for w in self.removals}
        for add in self.additions:
            if add.lemma.lower() in removed:
                raise InvalidPatch(f"{add.lemma!r} is both removed and added")
            if not add.source_lemma:
                raise InvalidPatch(f"addition {add.lemma!r} has no source_lemma")
            if not (-1.0 <= add.similarity <= 1.0):
                raise InvalidPatch(f"addition {add.lemma!r}: similarity {add.similarity} outside [-1, 1]")
            for a in add.associations:
                if not (0.0 <= a.intensity <= 1.0):
                    raise InvalidPatch(f"addition {add.lemma!r}: intensity {a.intensity} outside [0, 1]")

    @classmethod
    def from_json(cls, data: Mapping) -> "LexiconPatch":
        try:
            additions = tuple(
                Addition(
                    lemma=str(a["lemma"]).lower(),
                    source_lemma=str(a["source_lemma"]).lower(),
                    similarity=float(a["similarity"]),
                    associations=tuple(
                        Association(str(x["emotion"]).lower(), float(x["intensity"])) for x in a["associations"]
                    ),
                )
                for a in data.get("additions", [])
            )
            removals = tuple(str(w).lower() for w in data.get("removals", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidPatch(f"bad patch structure: {exc}") from exc
        return cls(removals, additions)

    def to_json(self) -> dict:
        return {"removals": list(self.removals), "additions": [a.to_json() for a in self.additions]}

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, ensure_ascii=False).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:10]


def read_patch(path: str | Path) -> LexiconPatch:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidPatch(f"{path}: {exc}") from exc
    return LexiconPatch.from_json(data)


def apply_patch(lex: EmotionLexicon, patch: LexiconPatch) -> EmotionLexicon:
    """Return a patched copy of ``lex``.

    Removals not present in ``lex`` are reported in the result's warnings
    (patches may target another lexicon release). An addition replaces any
    existing associations of its lemma.
    """
    entries = {w: dict(a) for w, a in lex.entries.items()}
    warnings: list[str] = []
    for lemma in patch.removals:
        if entries.pop(lemma.lower(), None) is None:
            warnings.append(f"removal {lemma!r} not found in lexicon")
    for add in patch.additions:
        entries[add.lemma.lower()] = {a.emotion: a.intensity for a in add.associations}
    suffix = f"+patch.{patch.digest()}"
    tag = lex.version_tag if lex.version_tag.endswith(suffix) else lex.version_tag + suffix
    return EmotionLexicon(entries, tag, tuple(warnings))


@dataclass(frozen=True)
class CooccurrenceMatrix:
    emotions: tuple[str, ...]
    values: np.ndarray
    counts: np.ndarray  # joint word counts; diagonal holds per-emotion totals

    def get(self, given: str, also: str) -> float:
        """P(also | given)."""
        return float(self.values[self.emotions.index(given), self.emotions.index(also)])

    def to_csv(self) -> str:
        rows = ["emotion," + ",".join(self.emotions)]
        for name, row in zip(self.emotions, self.values):
            rows.append(name + "," + ",".join(f"{v:.2f}" for v in row))
        return "\n".join(rows) + "\n"


def cooccurrence(lex: EmotionLexicon, emotions: Iterable[str] | None = None) -> CooccurrenceMatrix:
    """Conditional co-occurrence P(emotion j | emotion i) over lexicon words.

    Counting is by set membership; intensities are ignored.
    """
    names = tuple(emotions) if emotions is not None else lex.emotions
    index = {e: i for i, e in enumerate(names)}
    m = len(names)
    counts = np.zeros((m, m), dtype=np.int64)
    for assoc in lex.entries.values():
        ids = [index[e] for e in assoc if e in index]
        if ids:
            ids_arr = np.asarray(ids)
            counts[np.ix_(ids_arr, ids_arr)] += 1
    totals = np.diag(counts).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.where(totals[:, None] > 0, counts / np.where(totals > 0, totals, 1.0)[:, None], 0.0)
    return CooccurrenceMatrix(names, values, counts)


def emotion_proportions(lex: EmotionLexicon, emotions: Iterable[str] | None = None) -> dict[str, float]:
    """Share of all (word, emotion) associations carried by each emotion."""
    names = tuple(emotions) if emotions is not None else lex.emotions
    counts = {e: 0 for e in names}
    for assoc in lex.entries.values():
        for e in assoc:
            if e in counts:
                counts[e] += 1
    total = sum(counts.values())
    if total == 0:
        return {e: 0.0 for e in names}
    return {e: c / total for e, c in counts.items()}
