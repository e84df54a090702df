"""Chi-square term scoring and per-category top-k selection."""

from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .vectors import Vocabulary


class ContingencyTable(NamedTuple):
    """Document counts for one (term, category) pair.

    a: positives containing the term, b: positives without it,
    c: negatives containing the term, d: negatives without it.
    """

    a: int
    b: int
    c: int
    d: int

    @property
    def n(self) -> int:
        return self.a + self.b + self.c + self.d


def contingency(term: str, category: str, token_streams: Sequence[Sequence[str]], label_sets, vocab=None):
    """Count the 2x2 table of term presence against category membership."""
    if vocab is not None and term not in vocab.index:
        raise KeyError(f"unknown term {term!r}")
    if not any(category in labels for labels in label_sets):
        raise KeyError(f"unknown category {category!r}")
    a = b = c = d = 0
    for tokens, labels in zip(token_streams, label_sets):
        present = term in tokens
        if category in labels:
            if present:
                a += 1
            else:
                b += 1
        elif present:
            c += 1
        else:
            d += 1
    return ContingencyTable(a, b, c, d)


def chi_square(table: ContingencyTable) -> float:
    """``N (ad - bc)^2 / ((a+c)(b+d)(a+b)(c+d))``, or 0 if any margin is empty."""
    a, b, c, d = table
    denom = (a + c) * (b + d) * (a + b) * (c + d)
    if denom == 0:
        return 0.0
    return table.n * (a * d - b * c) ** 2 / denom


def chi_square_scores(a, b, c, d) -> np.ndarray:
    """Vectorized chi-square over arrays of counts."""
    a, b, c, d = (np.asarray(x, dtype=np.float64) for x in (a, b, c, d))
    n = a + b + c + d
    denom = (a + c) * (b + d) * (a + b) * (c + d)
    num = n * (a * d - b * c) ** 2
    out = np.zeros_like(num)
    np.divide(num, denom, out=out, where=denom > 0)
    return out


def presence_tables(presence: sp.spmatrix, positive: np.ndarray):
    """Arrays a, b, c, d for every column of a document-term matrix."""
    presence = sp.csr_matrix(presence)
    binary = presence.copy()
    binary.data = (binary.data != 0).astype(np.float64)
    positive = np.asarray(positive, dtype=bool)
    df = np.asarray(binary.sum(axis=0)).ravel()
    a = np.asarray(binary[positive].sum(axis=0)).ravel()
    c = df - a
    n_pos = int(positive.sum())
    n_neg = len(positive) - n_pos
    return a, n_pos - a, c, n_neg - c


@dataclass(frozen=True)
class FeatureRanking:
    category: str
    scored: Tuple[Tuple[str, float], ...]

    @property
    def terms(self) -> List[str]:
        return [t for t, _ in self.scored]

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for rank, (term, score) in enumerate(self.scored, start=1):
                fh.write(f"{rank}\t{term}\t{score:.10f}\n")


def ranked_order(scores: np.ndarray, terms: Sequence[str]) -> np.ndarray:
    """Indices sorted by score descending, ties broken by term."""
    term_rank = np.argsort(np.asarray(terms, dtype=object), kind="stable")
    lex = np.empty(len(terms), dtype=np.int64)
    lex[term_rank] = np.arange(len(terms))
    return np.lexsort((lex, -np.asarray(scores)))


def rank_features(category: str, vocab: Vocabulary, presence: sp.spmatrix, label_sets) -> FeatureRanking:
    """Score every vocabulary term against ``category`` (one-vs-rest)."""
    positive = np.array([category in labels for labels in label_sets])
    scores = chi_square_scores(*presence_tables(presence, positive))
    order = ranked_order(scores, vocab.terms)
    return FeatureRanking(category, tuple((vocab.terms[j], float(scores[j])) for j in order))


@dataclass(frozen=True)
class SelectedFeatures:
    terms: Tuple[str, ...]
    vocab_indices: np.ndarray
    remap: Dict[int, int]


def select_top_k(ranking: FeatureRanking, k: int, vocab: Vocabulary) -> SelectedFeatures:
    """The first ``min(k, |vocab|)`` ranked terms plus a compact reindexing."""
    if k < 1:
        raise ValueError("k must be >= 1")
    terms = tuple(ranking.terms[:k])
    idx = np.array([vocab.index[t] for t in terms], dtype=np.int64)
    return SelectedFeatures(terms, idx, {int(j): new for new, j in enumerate(idx)})


class ChiSquareSelector(BaseEstimator, TransformerMixin):
    """Keep the ``k`` columns with the highest chi-square score against ``y``.

    ``y`` holds +1 for the positive category and -1 otherwise. Output columns
    follow rank order. Ties are broken by column index, which matches the
    lexicographic term order of a sorted vocabulary.
    """

    def __init__(self, k=100):
        self.k = k

    def fit(self, X, y):
        y = np.asarray(y)
        self.scores_ = chi_square_scores(*presence_tables(X, y == 1))
        self.ranking_ = np.lexsort((np.arange(len(self.scores_)), -self.scores_))
        self.selected_ = self.ranking_[: min(self.k, len(self.ranking_))]
        return self

    def get_support(self, indices=False):
        check_is_fitted(self, "selected_")
        if indices:
            return self.selected_
        mask = np.zeros(len(self.scores_), dtype=bool)
        mask[self.selected_] = True
        return mask

    def transform(self, X):
        check_is_fitted(self, "selected_")
        return sp.csr_matrix(X)[:, self.selected_]
