"""Tokenization and tf-idf featurization of vulnerability descriptions.

Deliberately minimal text handling: lowercase, split on anything that is
not an ASCII letter or digit, drop single-character tokens, no stemming
and no stop-word removal. CVE descriptions carry their signal in raw
technical tokens ("smbv1", "ssl_context" -> "ssl", "context"), which
this keeps intact.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

TOKEN_RE = re.compile(r"[a-z0-9]{2,}")


class EmptyCorpus(ValueError):
    """A vocabulary cannot be fitted on zero documents."""


def tokenize(text: str) -> list[str]:
    """Lowercased alphanumeric tokens of length >= 2."""
    return TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Vocabulary:
    """Token-to-column map plus the document frequencies behind idf."""

    index: Mapping[str, int]
    document_frequency: Mapping[str, int]
    num_documents: int

    @property
    def size(self) -> int:
        return len(self.index)

    def idf(self, token: str) -> float:
        # Smoothed idf; never zero, so every vocabulary token contributes.
        df = self.document_frequency[token]
        return math.log((1 + self.num_documents) / (1 + df)) + 1.0


@dataclass(frozen=True)
class FeatureVector:
    """Sparse L2-normalized tf-idf vector.

    ``weights`` maps column index to weight; the norm is 1.0 for any
    document with at least one in-vocabulary token, else the vector is
    empty (all-zero).
    """

    dim: int
    weights: Mapping[int, float]

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dim)
        for col, weight in self.weights.items():
            dense[col] = weight
        return dense


def fit_vocabulary(corpus: Sequence[str], min_df: int = 1) -> Vocabulary:
    """Fit a vocabulary over a corpus of descriptions.

    Tokens must appear in at least ``min_df`` documents; columns are
    assigned in lexicographic token order so refitting the same corpus
    reproduces the identical vocabulary.
    """
    if not corpus:
        raise EmptyCorpus("cannot fit a vocabulary on an empty corpus")
    if min_df < 1:
        raise ValueError(f"min_df must be >= 1, got {min_df}")
    df: Counter[str] = Counter()
    for text in corpus:
        df.update(set(tokenize(text)))
    kept = sorted(token for token, count in df.items() if count >= min_df)
    return Vocabulary(
        index={token: col for col, token in enumerate(kept)},
        document_frequency={token: df[token] for token in kept},
        num_documents=len(corpus),
    )


def featurize(vocab: Vocabulary, text: str) -> FeatureVector:
    """tf-idf weights for one document: raw tf times smoothed idf, L2-normalized.

    Out-of-vocabulary tokens are ignored; a document with no known
    tokens yields the zero vector.
    """
    tf = Counter(token for token in tokenize(text) if token in vocab.index)
    if not tf:
        return FeatureVector(dim=vocab.size, weights={})
    items = sorted((vocab.index[token], count * vocab.idf(token)) for token, count in tf.items())
    norm = math.sqrt(sum(weight * weight for _, weight in items))
    return FeatureVector(dim=vocab.size, weights={col: weight / norm for col, weight in items})


def design_matrix(vocab: Vocabulary, texts: Sequence[str]) -> np.ndarray:
    """Dense n-by-V matrix of featurized documents, row order preserved."""
    X = np.zeros((len(texts), vocab.size))
    for row, text in enumerate(texts):
        for col, weight in featurize(vocab, text).weights.items():
            X[row, col] = weight
    return X
