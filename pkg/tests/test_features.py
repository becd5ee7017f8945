"""Tokenizer, vocabulary fitting, and tf-idf featurization."""

import math
import random

import numpy as np
import pytest

from vulnrank.triage.features import (
    EmptyCorpus,
    design_matrix,
    featurize,
    fit_vocabulary,
    tokenize,
)


class TestTokenize:
    def test_plain_description(self):
        text = "allows remote attackers to execute arbitrary code"
        assert tokenize(text) == [
            "allows", "remote", "attackers", "to", "execute", "arbitrary", "code",
        ]

    def test_technical_tokens_split_and_kept(self):
        assert tokenize("SMBv1 server (MS17-010)!") == ["smbv1", "server", "ms17", "010"]

    def test_empty(self):
        assert tokenize("") == []

    def test_short_tokens_dropped(self):
        assert tokenize("a b& c2 x") == ["c2"]

    def test_underscore_splits(self):
        assert tokenize("ssl_context") == ["ssl", "context"]


class TestFitVocabulary:
    def test_counting(self):
        vocab = fit_vocabulary(["aa bb", "bb cc"], min_df=1)
        assert set(vocab.index) == {"aa", "bb", "cc"}
        assert vocab.document_frequency == {"aa": 1, "bb": 2, "cc": 1}
        assert vocab.num_documents == 2

    def test_min_df_threshold(self):
        vocab = fit_vocabulary(["aa bb", "bb cc"], min_df=2)
        assert set(vocab.index) == {"bb"}

    def test_lexicographic_columns(self):
        vocab = fit_vocabulary(["zz yy xx"], min_df=1)
        assert vocab.index == {"xx": 0, "yy": 1, "zz": 2}

    def test_repeat_within_doc_counts_once_for_df(self):
        vocab = fit_vocabulary(["aa aa aa", "bb"], min_df=2)
        assert "aa" not in vocab.index

    def test_deterministic_rebuild(self):
        rng = random.Random(3)
        pool = [f"tok{n}" for n in range(60)]
        corpus = [" ".join(rng.choices(pool, k=12)) for _ in range(200)]
        assert fit_vocabulary(corpus, min_df=2) == fit_vocabulary(corpus, min_df=2)

    def test_invariants_on_random_corpora(self):
        rng = random.Random(31)
        pool = [f"tok{n}" for n in range(40)]
        for _ in range(20):
            corpus = [
                " ".join(rng.choices(pool, k=rng.randrange(1, 15)))
                for _ in range(rng.randrange(1, 50))
            ]
            vocab = fit_vocabulary(corpus, min_df=rng.choice((1, 2, 3)))
            # Columns are dense 0..V-1 and no df exceeds the corpus size.
            assert sorted(vocab.index.values()) == list(range(vocab.size))
            assert all(1 <= df <= vocab.num_documents for df in vocab.document_frequency.values())
            assert set(vocab.document_frequency) == set(vocab.index)

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            fit_vocabulary([], min_df=1)

    def test_bad_min_df(self):
        with pytest.raises(ValueError):
            fit_vocabulary(["aa"], min_df=0)


class TestFeaturize:
    def toy_vocab(self):
        return fit_vocabulary(["alpha beta", "beta gamma", "beta beta delta"], min_df=1)

    def test_oov_only_gives_zero_vector(self):
        fv = featurize(self.toy_vocab(), "omega sigma")
        assert fv.weights == {}
        assert np.all(fv.to_dense() == 0)

    def test_single_known_token_is_unit(self):
        fv = featurize(self.toy_vocab(), "alpha")
        assert list(fv.weights.values()) == [1.0]

    def test_hand_computed_weights(self):
        # Corpus: {alpha beta | beta gamma | beta beta delta}, N=3.
        # df(alpha)=1, df(beta)=3; idf = ln((1+N)/(1+df)) + 1.
        vocab = self.toy_vocab()
        fv = featurize(vocab, "alpha beta")
        idf_alpha = math.log(4 / 2) + 1
        idf_beta = math.log(4 / 4) + 1
        norm = math.sqrt(idf_alpha**2 + idf_beta**2)
        assert fv.weights[vocab.index["alpha"]] == pytest.approx(idf_alpha / norm, abs=1e-9)
        assert fv.weights[vocab.index["beta"]] == pytest.approx(idf_beta / norm, abs=1e-9)

    def test_tf_scales_before_normalization(self):
        # Two alphas to one beta: tf doubles alpha's weight pre-norm.
        vocab = self.toy_vocab()
        fv = featurize(vocab, "alpha alpha beta")
        idf_alpha = math.log(2) + 1
        norm = math.sqrt((2 * idf_alpha) ** 2 + 1.0)
        assert fv.weights[vocab.index["alpha"]] == pytest.approx(2 * idf_alpha / norm, abs=1e-9)

    def test_norm_is_zero_or_one(self):
        rng = random.Random(5)
        pool = [f"tok{n}" for n in range(30)] + ["zzz-oov"]
        corpus = [" ".join(rng.choices(pool, k=8)) for _ in range(40)]
        vocab = fit_vocabulary(corpus[:30], min_df=2)
        for text in corpus + ["", "zz-unseen-token"]:
            fv = featurize(vocab, text)
            norm = math.sqrt(sum(w * w for w in fv.weights.values()))
            assert norm == pytest.approx(1.0, abs=1e-12) or norm == 0.0

    def test_repetition_invariance(self):
        # Repeating a document rescales all tf counts; normalization
        # cancels it.
        vocab = self.toy_vocab()
        once = featurize(vocab, "alpha beta")
        thrice = featurize(vocab, " ".join(["alpha beta"] * 3))
        assert set(once.weights) == set(thrice.weights)
        for col in once.weights:
            assert thrice.weights[col] == pytest.approx(once.weights[col], abs=1e-12)

    def test_design_matrix_rows_match_featurize(self):
        vocab = self.toy_vocab()
        texts = ["alpha beta", "omega", "beta delta"]
        X = design_matrix(vocab, texts)
        assert X.shape == (3, vocab.size)
        for row, text in enumerate(texts):
            assert np.allclose(X[row], featurize(vocab, text).to_dense())
