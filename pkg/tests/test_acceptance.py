"""Acceptance gate. Each test prints one ``ACCEPTANCE <n> PASS|FAIL`` line.

Run alone with ``pytest -m acceptance -s tests/test_acceptance.py``.
"""

import csv
import json
import os
import random
import shutil
import time
from pathlib import Path

import pytest
from conftest import FIXTURES, MICRO, lex_from, make_doc
from oracles import brute_pair_counts, naive_score

import test_embed
import test_ingest
import test_lexicon
import test_score
from moodlex.cli import EXIT_OK, main
from moodlex.embed import cooccurrence_counts, ppmi
from moodlex.ingest import Metadata, ingest_corpus, iter_raw_books
from moodlex.lexicon import CANONICAL_EMOTIONS, EmotionLexicon, cooccurrence, read_lexicon
from moodlex.score import compare_strategies, score_corpus, score_segment, scores_csv
from moodlex.structure import AnnotatedDocument, Segment, Strategy, Token, chapterize, fallback_tokenize

pytestmark = pytest.mark.acceptance

FEIL_ENV = "MOODLEX_FEIL"
FEIL_DIR = FIXTURES / "feil"


def report(n, ok, detail, capsys):
    with capsys.disabled():
        print(f"\nACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def find_feil():
    env = os.environ.get(FEIL_ENV)
    if env:
        return Path(env)
    found = sorted(FEIL_DIR.glob("*.txt")) + sorted(FEIL_DIR.glob("*.tsv")) if FEIL_DIR.is_dir() else []
    return found[0] if found else None


def test_1_feil_cooccurrence(capsys):
    path = find_feil()
    if path is None or not path.is_file():
        report(1, False, f"FEIL lexicon not available (set {FEIL_ENV} or add a file under tests/fixtures/feil/)", capsys)
    lex = read_lexicon(path)
    start = time.perf_counter()
    m = cooccurrence(lex, CANONICAL_EMOTIONS)
    elapsed = time.perf_counter() - start
    got = {
        "P(fear|anger)": (m.get("anger", "fear"), 0.50),
        "P(anger|fear)": (m.get("fear", "anger"), 0.42),
        "P(sadness|fear)": (m.get("fear", "sadness"), 0.09),
    }
    ok = all(abs(v - want) <= 0.05 for v, want in got.values()) and elapsed < 1.0
    detail = ", ".join(f"{k}={v:.3f} (want {w:.2f}+-0.05)" for k, (v, w) in got.items())
    report(1, ok, f"{detail}; {elapsed:.3f}s", capsys)


def test_2_golden_scores(tmp_path, capsys):
    golden = (MICRO / "golden_scores.csv").read_bytes()
    start = time.perf_counter()
    outs = []
    for run in ("a", "b"):
        code = main(["score", "--corpus-dir", str(MICRO / "books"), "--lexicon", str(MICRO / "lexicon.tsv"),
                     "-o", str(tmp_path / run)])
        assert code == EXIT_OK
        outs.append((tmp_path / run / "scores.csv").read_bytes())
    elapsed = time.perf_counter() - start
    ok = outs[0] == outs[1] == golden and elapsed < 5.0
    report(2, ok, f"two runs byte-identical to golden scores.csv={outs[0] == outs[1] == golden}; {elapsed:.2f}s", capsys)


def random_case(rng):
    vocab = [f"s{i}" for i in range(rng.randint(1, 300))]
    rows = {}
    for _ in range(rng.randint(0, 400)):
        rows[(rng.choice(vocab), rng.choice(CANONICAL_EMOTIONS))] = rng.random()
    rows = [(w, e, v) for (w, e), v in rows.items()]
    size = rng.randint(1, 500)
    tokens = [(rng.choice(vocab), rng.random() > 0.15) for _ in range(size)]
    tokens[rng.randrange(size)] = (tokens[0][0], True)
    return tokens, rows


def test_3_oracle_equivalence(capsys):
    rng = random.Random(20261014)
    cases = [random_case(rng) for _ in range(1000)]
    start = time.perf_counter()
    mismatches = 0
    for tokens, rows in cases:
        seg = Segment("d", Strategy.FIRST_PARAGRAPHS, tuple(Token(w, w, is_w, 0, 0) for w, is_w in tokens))
        prof, _ = score_segment(seg, lex_from(rows))
        want, words, matched = naive_score(tokens, rows, CANONICAL_EMOTIONS)
        if prof.scores != want or (prof.token_count, prof.matched_count) != (words, matched):
            mismatches += 1
    elapsed = time.perf_counter() - start
    report(3, mismatches == 0 and elapsed < 10.0, f"1000 random segments, {mismatches} mismatches; {elapsed:.2f}s", capsys)


def large_ppmi_check():
    rng = random.Random(7)
    sentences, total = [], 0
    while total < 1000:
        s = [rng.choice("abcdefghij") for _ in range(rng.randint(1, 25))]
        sentences.append(s)
        total += len(s)
    for window, min_count in ((1, 1), (3, 20), (5, 80)):
        keep, expected = brute_pair_counts(sentences, window, min_count)
        vocab, counts = cooccurrence_counts([make_doc(sentences)], window, min_count)
        got = {(vocab[i], vocab[j]): int(v) for (i, j), v in counts.todok().items() if v}
        assert set(vocab) == keep and got == expected
        assert (ppmi(counts).data >= 0).all()


PROPERTIES = {
    "normalization invariance": test_score.test_self_concatenation_invariant,
    "co-occurrence asymmetry identity": test_lexicon.test_asymmetry_identity,
    "cosine symmetry": test_embed.test_cosine_symmetric,
    "cosine scale invariance": test_embed.test_cosine_scale_invariant,
    "cosine self-similarity": test_embed.test_cosine_self_similarity,
    "PPMI counts and non-negativity": test_embed.test_ppmi_counts_and_nonnegativity,
    "PPMI brute force, 1000 tokens": large_ppmi_check,
    "patch idempotence": test_lexicon.test_patch_idempotent_and_valid,
    "strip_boilerplate idempotence": test_ingest.test_strip_boilerplate_idempotent,
}


def test_4_property_suite(capsys):
    failed = []
    for name, prop in PROPERTIES.items():
        try:
            prop()
        except Exception as exc:  # noqa: BLE001  any failure counts against the criterion
            failed.append(f"{name}: {type(exc).__name__}")
    report(4, not failed, f"{len(PROPERTIES) - len(failed)}/{len(PROPERTIES)} properties hold {failed or ''}", capsys)


def test_5_convergence_direction(capsys):
    lex = read_lexicon(MICRO / "lexicon.tsv")
    cleaned, _ = ingest_corpus(iter_raw_books(MICRO / "books"))
    docs = [chapterize(fallback_tokenize(c.body, c.metadata), c.body) for c in cleaned]
    fp = score_corpus(docs, lex, Strategy.FIRST_PARAGRAPHS).profiles
    co = score_corpus(docs, lex, Strategy.CHAPTER_OPENINGS).profiles
    r = compare_strategies(fp, co, lex)
    ok = r.mean_b < r.mean_a
    report(5, ok, f"mean L1 first-paragraphs={r.mean_a:.4f}, chapter-openings={r.mean_b:.4f}", capsys)


def big_corpus():
    rng = random.Random(99)
    words = [f"sana{i}" for i in range(20000)]
    lex_entries = {}
    for w in words[:10000]:
        emos = rng.sample(CANONICAL_EMOTIONS, rng.randint(1, 3))
        lex_entries[w] = {e: round(rng.random(), 3) for e in emos}
    lex = EmotionLexicon(lex_entries, "synthetic-10k")
    docs = []
    for d in range(100):
        tokens = []
        for c in range(10):
            for i in range(1000):
                w = rng.choice(words)
                tokens.append(Token(w, w, i % 12 != 11, i // 12, c, c))
        docs.append(AnnotatedDocument(Metadata.placeholder(f"big{d:03d}"), tuple(tokens), tuple(f"p{c}" for c in range(10))))
    return docs, lex


def test_6_throughput(capsys):
    docs, lex = big_corpus()
    n_tokens = sum(len(d.tokens) for d in docs)
    start = time.perf_counter()
    serial = score_corpus(docs, lex, Strategy.CHAPTER_OPENINGS, k=1000, jobs=1)
    elapsed = time.perf_counter() - start
    scored = sum(p.token_count for p in serial.profiles if p.chapter_idx != "mean")
    parallel = score_corpus(docs, lex, Strategy.CHAPTER_OPENINGS, k=1000, jobs=4)
    same = scores_csv(serial.profiles, lex.emotions) == scores_csv(parallel.profiles, lex.emotions)
    ok = n_tokens == 1_000_000 and elapsed < 10.0 and same
    report(6, ok, f"{n_tokens} tokens ({scored} word tokens) vs {len(lex)} entries in {elapsed:.2f}s; "
                  f"parallel identical={same}", capsys)


def test_7_ingest_bookkeeping(tmp_path, capsys):
    src = tmp_path / "corpus"
    src.mkdir()
    books = sorted((MICRO / "books").glob("*.txt"))
    for i in range(18):
        shutil.copy(books[i % len(books)], src / f"kirja{i:02d}.txt")
    (src / "rikki01.txt").write_bytes(b"\x81\x8d\x8f\x90\x9d")
    (src / "rikki02.txt").write_bytes(b"Alku \x81 loppu \x9d")
    out = tmp_path / "out"
    code = main(["ingest", "--corpus-dir", str(src), "-o", str(out)])
    manifest = json.loads((out / "manifest.json").read_text())
    run = json.loads((out / "run.json").read_text())
    ok_n = sum(not r["skipped"] for r in manifest)
    skip_n = sum(r["skipped"] for r in manifest)
    reconciled = (
        ok_n + skip_n == 20
        and len({r["source_id"] for r in manifest}) == 20
        and sorted(r["source_id"] for r in run["documents"]) == sorted(r["source_id"] for r in manifest)
        and len(list(out.glob("*.txt"))) == ok_n
    )
    ok = code == EXIT_OK and ok_n == 18 and skip_n == 2 and reconciled
    report(7, ok, f"{ok_n} ok + {skip_n} skipped of 20, reconciled={reconciled}", capsys)


def test_golden_file_is_well_formed():
    rows = list(csv.DictReader(open(MICRO / "golden_scores.csv")))
    assert len({r["doc_id"] for r in rows}) == 5
