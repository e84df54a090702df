"""Bag-of-words vocabulary, TF-IDF weighting and sparse vector math."""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted


@dataclass(frozen=True)
class SparseVector:
    """Ordered ``(index, weight)`` pairs over a fixed dimension."""

    indices: Tuple[int, ...]
    weights: Tuple[float, ...]
    dimension: int

    def __post_init__(self):
        if len(self.indices) != len(self.weights):
            raise ValueError("indices and weights differ in length")
        if self.dimension <= 0:
            raise ValueError("dimension must be positive")
        prev = -1
        for i, w in zip(self.indices, self.weights):
            if i <= prev:
                raise ValueError("indices must be strictly increasing")
            if i >= self.dimension:
                raise ValueError(f"index {i} out of range for dimension {self.dimension}")
            if w == 0:
                raise ValueError("zero weights must not be stored")
            prev = i

    @classmethod
    def from_dict(cls, weights: Dict[int, float], dimension: int) -> "SparseVector":
        items = sorted((i, w) for i, w in weights.items() if w != 0)
        return cls(tuple(i for i, _ in items), tuple(float(w) for _, w in items), dimension)

    @classmethod
    def from_dense(cls, values: Sequence[float]) -> "SparseVector":
        return cls.from_dict(dict(enumerate(values)), len(values))

    def to_dict(self) -> Dict[int, float]:
        return dict(zip(self.indices, self.weights))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dimension)
        out[list(self.indices)] = self.weights
        return out

    def dot(self, other: "SparseVector") -> float:
        if self.dimension != other.dimension:
            raise ValueError(f"dimension mismatch: {self.dimension} != {other.dimension}")
        small, large = (self, other) if len(self.indices) <= len(other.indices) else (other, self)
        lookup = large.to_dict()
        return math.fsum(w * lookup[i] for i, w in zip(small.indices, small.weights) if i in lookup)

    def norm(self) -> float:
        return math.sqrt(math.fsum(w * w for w in self.weights))


def cosine(u: SparseVector, v: SparseVector) -> float:
    """Cosine similarity; 0 when either vector has zero norm."""
    dot = u.dot(v)
    nu, nv = u.norm(), v.norm()
    if nu == 0 or nv == 0:
        return 0.0
    return dot / (nu * nv)


def idf(n_docs: int, df: int) -> float:
    """Inverse document frequency ``ln(N / df)``."""
    if df <= 0:
        raise ValueError("document frequency must be >= 1; unseen terms carry no weight")
    if df > n_docs:
        raise ValueError(f"document frequency {df} exceeds document count {n_docs}")
    return math.log(n_docs / df)


@dataclass(frozen=True)
class Vocabulary:
    terms: Tuple[str, ...]
    index: Dict[str, int]
    df: np.ndarray
    n_docs: int

    def __len__(self):
        return len(self.terms)

    def idf_table(self) -> np.ndarray:
        return np.log(self.n_docs / self.df)

    def dump(self, path) -> None:
        """Write ``term<TAB>df<TAB>idf`` rows."""
        table = self.idf_table()
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for term, df, w in zip(self.terms, self.df, table):
                fh.write(f"{term}\t{df}\t{w:.10f}\n")


def build_vocabulary(token_streams: Sequence[Sequence[str]]) -> Vocabulary:
    """Collect the sorted term set and document frequencies of a training split."""
    if not token_streams:
        raise ValueError("empty training list")
    df: Dict[str, int] = {}
    for tokens in token_streams:
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1
    if not df:
        raise ValueError("empty vocabulary")
    terms = tuple(sorted(df))
    return Vocabulary(
        terms=terms,
        index={t: i for i, t in enumerate(terms)},
        df=np.array([df[t] for t in terms], dtype=np.int64),
        n_docs=len(token_streams),
    )


def count_matrix(token_streams: Iterable[Sequence[str]], vocab: Vocabulary) -> sp.csr_matrix:
    """Raw term counts as CSR; out-of-vocabulary tokens are dropped."""
    indptr = [0]
    indices: List[int] = []
    data: List[int] = []
    for tokens in token_streams:
        counts: Dict[int, int] = {}
        for t in tokens:
            j = vocab.index.get(t)
            if j is not None:
                counts[j] = counts.get(j, 0) + 1
        for j in sorted(counts):
            indices.append(j)
            data.append(counts[j])
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.array(data, dtype=np.float64), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(indptr) - 1, len(vocab)),
    )


def weight_counts(counts: sp.spmatrix, idf_values: np.ndarray) -> sp.csr_matrix:
    """Multiply each column by its IDF and drop the resulting zeros."""
    weighted = sp.csr_matrix(counts @ sp.diags(idf_values))
    weighted.eliminate_zeros()
    weighted.sort_indices()
    return weighted


def tfidf_vector(tokens: Sequence[str], vocab: Vocabulary, idf_values: np.ndarray) -> SparseVector:
    counts: Dict[int, int] = {}
    for t in tokens:
        j = vocab.index.get(t)
        if j is not None:
            counts[j] = counts.get(j, 0) + 1
    return SparseVector.from_dict({j: tf * float(idf_values[j]) for j, tf in counts.items()}, len(vocab))


def row_vector(matrix: sp.spmatrix, i: int) -> SparseVector:
    row = sp.csr_matrix(matrix[i])
    row.eliminate_zeros()
    row.sort_indices()
    return SparseVector(tuple(int(j) for j in row.indices), tuple(float(w) for w in row.data), matrix.shape[1])


class TfidfWeighter(BaseEstimator, TransformerMixin):
    """Fit a vocabulary and IDF table on token lists; emit TF-IDF CSR rows.

    TF is the raw in-document count and IDF is ``ln(N/df)`` over the fitted
    split only.
    """

    def fit(self, X, y=None):
        self.vocabulary_ = build_vocabulary(list(X))
        self.idf_ = self.vocabulary_.idf_table()
        return self

    def counts(self, X):
        check_is_fitted(self, "vocabulary_")
        return count_matrix(X, self.vocabulary_)

    def transform(self, X):
        return weight_counts(self.counts(X), self.idf_)
