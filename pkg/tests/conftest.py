import sys
from pathlib import Path

import pytest

from moodlex.ingest import Metadata
from moodlex.lexicon import load_lexicon, read_lexicon
from moodlex.structure import AnnotatedDocument, Token

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"
MICRO = FIXTURES / "microcorpus"


def make_doc(paragraphs, doc_id="doc", chapters=None):
    """Document from lists of lemmas per paragraph; '.'/',' become punctuation.

    ``chapters`` optionally gives the chapter index of each paragraph.
    """
    tokens = []
    sent = 0
    for p, words in enumerate(paragraphs):
        for w in words:
            chap = chapters[p] if chapters else 0
            tokens.append(Token(w, w.lower(), w not in {".", ",", "!", "?"}, sent, p, chap))
        sent += 1
    texts = tuple(" ".join(ws) for ws in paragraphs)
    return AnnotatedDocument(Metadata.placeholder(doc_id), tuple(tokens), texts)


def lex_from(rows, tag="test"):
    return load_lexicon([f"{w}\t{e}\t{v}" for w, e, v in rows], tag)


@pytest.fixture
def micro_lexicon():
    return read_lexicon(MICRO / "lexicon.tsv")


@pytest.fixture
def micro_books():
    return MICRO / "books"
