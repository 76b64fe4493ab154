import math

import numpy as np
import pytest
from conftest import FIXTURES, lex_from, make_doc
from hypothesis import assume, given
from hypothesis import strategies as st
from oracles import brute_pair_counts

from moodlex.embed import (
    EmbeddingSpace,
    build_ppmi_space,
    cooccurrence_counts,
    cosine,
    load_vectors,
    ppmi,
    propose_additions,
)
from moodlex.errors import DimensionMismatch, EmptyCorpus, InvalidParameter, MalformedHeader, ZeroVector
from moodlex.lexicon import Association, read_lexicon

TOY = FIXTURES / "toy"


def toy_space():
    with open(TOY / "vectors.txt", encoding="utf-8") as fh:
        return load_vectors(fh)


class TestLoadVectors:
    def test_well_formed(self):
        space = load_vectors(["2 3", "a 1 0 0", "b 0 1 0.5"])
        assert space.dim == 3 and len(space) == 2
        assert space.vector("b").tolist() == [0.0, 1.0, 0.5]

    def test_short_row(self):
        with pytest.raises(DimensionMismatch) as exc:
            load_vectors(["2 3", "a 1 0 0", "b 1 0"])
        assert (exc.value.line_no, exc.value.expected, exc.value.got) == (3, 3, 2)

    def test_empty_stream(self):
        with pytest.raises(MalformedHeader):
            load_vectors([])

    def test_bad_header(self):
        with pytest.raises(MalformedHeader):
            load_vectors(["a 1 0 0"])

    def test_count_mismatch_warns(self):
        assert load_vectors(["3 1", "a 1"]).warnings


class TestCosine:
    def test_self(self):
        assert cosine([3.0, -2.0, 0.5], [3.0, -2.0, 0.5]) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal(self):
        assert cosine((1, 0), (0, 1)) == 0.0

    def test_diagonal(self):
        # 1 / sqrt(2) by hand
        assert cosine((1, 0), (1, 1)) == pytest.approx(0.70710678, abs=1e-8)

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            cosine((0, 0), (1, 0))

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidParameter):
            cosine((1, 0), (1, 0, 0))


vectors = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=3, max_size=3)


@given(vectors, vectors)
def test_cosine_symmetric(u, v):
    assume(np.linalg.norm(u) > 1e-6 and np.linalg.norm(v) > 1e-6)
    assert abs(cosine(u, v) - cosine(v, u)) <= 1e-12


@given(vectors)
def test_cosine_self_similarity(u):
    assume(np.linalg.norm(u) > 1e-6)
    assert cosine(u, u) == pytest.approx(1.0, abs=1e-12)


@given(vectors, vectors, st.floats(1e-3, 1e3))
def test_cosine_scale_invariant(u, v, alpha):
    assume(np.linalg.norm(u) > 1e-3 and np.linalg.norm(v) > 1e-3)
    assert abs(cosine(np.multiply(alpha, u), v) - cosine(u, v)) <= 1e-9


class TestPPMI:
    def test_counts_match_brute_force(self):
        # 10-token toy corpus "a b a b ..." in one sentence
        sentence = ["a", "b"] * 5
        vocab, counts = cooccurrence_counts([make_doc([sentence])], window=1, min_count=1)
        _, expected = brute_pair_counts([sentence], 1, 1)
        got = {(vocab[i], vocab[j]): int(counts[i, j]) for i in range(len(vocab)) for j in range(len(vocab))}
        assert {k: v for k, v in got.items() if v} == expected
        assert expected == {("a", "b"): 9, ("b", "a"): 9}

    def test_rare_words_dropped(self):
        doc = make_doc([["x", "y", "x", "y", "z"]])
        vocab, _ = cooccurrence_counts([doc], window=2, min_count=2)
        assert vocab == ("x", "y")

    def test_window_spans_dropped_word(self):
        # distance is measured before removing rare words
        doc = make_doc([["a", "r", "b"], ["a", "b"]])
        vocab, counts = cooccurrence_counts([doc], window=1, min_count=2)
        i, j = vocab.index("a"), vocab.index("b")
        assert counts[i, j] == 1

    def test_punctuation_ignored(self):
        doc = make_doc([["a", ",", "b"]])
        vocab, counts = cooccurrence_counts([doc], window=1, min_count=1)
        assert counts[vocab.index("a"), vocab.index("b")] == 1

    def test_sentences_do_not_mix(self):
        doc = make_doc([["a"], ["b"]])
        with pytest.raises(EmptyCorpus):
            build_ppmi_space([doc], window=5, min_count=1)

    def test_no_docs(self):
        with pytest.raises(EmptyCorpus):
            build_ppmi_space([])

    def test_formula(self):
        docs = [make_doc([["a", "b", "c", "a", "b"]])]
        vocab, counts = cooccurrence_counts(docs, window=1, min_count=1)
        dense = counts.toarray()
        n = dense.sum()
        expected = np.zeros_like(dense)
        for i in range(len(vocab)):
            for j in range(len(vocab)):
                if dense[i, j]:
                    expected[i, j] = max(0.0, math.log(dense[i, j] * n / (dense[i].sum() * dense[:, j].sum())))
        assert np.allclose(ppmi(counts).toarray(), expected)


@given(st.lists(st.lists(st.sampled_from("abcde"), min_size=2, max_size=15), min_size=1, max_size=6),
       st.integers(1, 4), st.integers(1, 3))
def test_ppmi_counts_and_nonnegativity(sentences, window, min_count):
    doc = make_doc(sentences)
    keep, expected = brute_pair_counts(sentences, window, min_count)
    try:
        vocab, counts = cooccurrence_counts([doc], window, min_count)
    except EmptyCorpus:
        assert not keep
        return
    assert set(vocab) == keep
    got = {(vocab[i], vocab[j]): int(v) for (i, j), v in counts.todok().items() if v}
    assert got == expected
    assert (ppmi(counts).data >= 0).all()


class TestPropose:
    def test_valkea_copies_kirkas(self):
        lex = read_lexicon(TOY / "lexicon.tsv")
        proposals, skipped = propose_additions(toy_space(), lex, ["valkea", "juna", "lentokone"])
        assert len(proposals) == 1
        p = proposals[0]
        assert (p.candidate, p.neighbor) == ("valkea", "kirkas")
        assert p.similarity == pytest.approx(0.9, abs=1e-9)
        assert set(p.associations) == lex.lookup("kirkas")
        assert dict(skipped) == {"juna": "no neighbor with similarity >= 0.7", "lentokone": "not in embedding space"}

    def test_tie_picks_smaller_word(self):
        space = EmbeddingSpace(("b", "a", "q"), np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]))
        lex = lex_from([("a", "joy", 0.1), ("b", "fear", 0.2)])
        (p,), _ = propose_additions(space, lex, ["q"], min_sim=0.5)
        assert p.neighbor == "a"
        assert p.associations == (Association("joy", 0.1),)

    def test_k_limits_neighbors(self):
        lex = read_lexicon(TOY / "lexicon.tsv")
        (p,), _ = propose_additions(toy_space(), lex, ["valkoinen"], k=1, min_sim=0.0)
        assert len(p.alternatives) == 1

    def test_deterministic(self):
        lex = read_lexicon(TOY / "lexicon.tsv")
        cands = ["valkoinen", "valkea", "juna"]
        assert propose_additions(toy_space(), lex, cands) == propose_additions(toy_space(), lex, cands)

    def test_ppmi_space(self):
        sents = [["kirkas", "päivä", "paistaa"], ["valkea", "päivä", "paistaa"], ["tumma", "yö", "tulee"]] * 3
        space = build_ppmi_space([make_doc(sents)], window=2, min_count=1)
        lex = lex_from([("kirkas", "joy", 0.6), ("tumma", "fear", 0.5)])
        (p,), _ = propose_additions(space, lex, ["valkea"], min_sim=0.5)
        assert p.neighbor == "kirkas"

    @given(st.lists(st.lists(st.floats(-1, 1, allow_nan=False), min_size=2, max_size=2), min_size=2, max_size=8),
           st.floats(-1, 1))
    def test_proposal_copies_neighbor(self, rows, min_sim):
        words = tuple(f"w{i}" for i in range(len(rows)))
        space = EmbeddingSpace(words, np.array(rows))
        lex = lex_from([(w, "joy", 0.5) for w in words[1:]] + [(w, "fear", 0.25) for w in words[1::2]])
        proposals, skipped = propose_additions(space, lex, [words[0]], min_sim=min_sim)
        assert len(proposals) + len(skipped) == 1
        for p in proposals:
            assert set(p.associations) == lex.lookup(p.neighbor)
            assert p.similarity >= min_sim
