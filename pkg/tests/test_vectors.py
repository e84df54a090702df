import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from medtextcat.vectors import (
    SparseVector,
    TfidfWeighter,
    build_vocabulary,
    count_matrix,
    cosine,
    idf,
    row_vector,
    tfidf_vector,
    weight_counts,
)


def test_build_vocabulary():
    vocab = build_vocabulary([["a", "b"], ["b", "b"]])
    assert vocab.terms == ("a", "b")
    assert vocab.df.tolist() == [1, 2]
    assert vocab.index == {"a": 0, "b": 1}
    assert build_vocabulary([["x"]]).df.tolist() == [1]


def test_empty_vocabulary():
    with pytest.raises(ValueError, match="empty vocabulary"):
        build_vocabulary([[], []])
    with pytest.raises(ValueError):
        build_vocabulary([])


@pytest.mark.parametrize(
    "n, df, expected",
    [
        (100, 100, 0.0),
        (100, 1, 2 * math.log(10)),  # 4.60517...
        (10, 5, math.log(2)),  # 0.69314...
    ],
)
def test_idf(n, df, expected):
    assert idf(n, df) == pytest.approx(expected, abs=1e-15)


def test_idf_rejects_unseen():
    with pytest.raises(ValueError):
        idf(10, 0)
    with pytest.raises(ValueError):
        idf(10, 11)


def test_tfidf_product():
    vocab = build_vocabulary([["t", "t", "t"], ["u"]])
    table = np.array([2.0, 1.0])
    v = tfidf_vector(["t", "t", "t"], vocab, table)
    assert v.to_dict() == {0: 6.0}


def test_tfidf_all_oov():
    vocab = build_vocabulary([["a"]])
    v = tfidf_vector(["zzz", "yyy"], vocab, vocab.idf_table())
    assert v.indices == () and v.dimension == 1


def test_tfidf_two_doc_corpus():
    docs = [["a", "b"], ["b"]]
    vocab = build_vocabulary(docs)
    v = tfidf_vector(docs[0], vocab, vocab.idf_table())
    # weight(a) = 1 * ln(2/1); weight(b) = 1 * ln(2/2) = 0 and is not stored
    assert v.indices == (0,)
    assert v.weights[0] == pytest.approx(0.6931471805599453, abs=1e-15)


def test_weighter_matches_single_vector_path():
    docs = [["a", "b", "a"], ["b", "c"], ["c", "c", "d"]]
    w = TfidfWeighter().fit(docs)
    X = w.transform(docs + [["a", "zz"]])
    for i, d in enumerate(docs + [["a", "zz"]]):
        assert row_vector(X, i) == tfidf_vector(d, w.vocabulary_, w.idf_)


def test_test_vectorization_independent_of_test_split():
    train = [["a", "b"], ["b", "c"], ["c"]]
    vocab = build_vocabulary(train)
    alone = count_matrix([["a", "c", "q"]], vocab)
    together = count_matrix([["b"], ["a", "c", "q"], ["c", "c"]], vocab)
    assert (alone.toarray()[0] == together.toarray()[1]).all()


def test_cosine_examples():
    u = SparseVector.from_dense([1.0, 0.0])
    v = SparseVector.from_dense([1.0, 1.0])
    assert cosine(v, v) == pytest.approx(1.0)
    assert cosine(SparseVector.from_dense([1.0, 0.0]), SparseVector.from_dense([0.0, 3.0])) == 0.0
    assert cosine(u, v) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert cosine(u, SparseVector((), (), 2)) == 0.0


def test_cosine_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        cosine(SparseVector.from_dense([1.0]), SparseVector.from_dense([1.0, 2.0]))


def test_sparse_vector_invariants():
    with pytest.raises(ValueError):
        SparseVector((1, 0), (1.0, 1.0), 3)
    with pytest.raises(ValueError):
        SparseVector((0,), (0.0,), 3)
    with pytest.raises(ValueError):
        SparseVector((3,), (1.0,), 3)


_dense = st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=6)


@given(_dense, _dense)
def test_cosine_symmetry(a, b):
    n = min(len(a), len(b))
    u, v = SparseVector.from_dense(a[:n]), SparseVector.from_dense(b[:n])
    assert cosine(u, v) == pytest.approx(cosine(v, u))
    assert -1e-12 <= cosine(u, v) <= 1 + 1e-12


@given(_dense, st.floats(1e-3, 1e3))
def test_cosine_scale_invariance(a, alpha):
    u = SparseVector.from_dense(a)
    if u.norm() == 0:
        return
    assert cosine(u, SparseVector.from_dense([alpha * x for x in a])) == pytest.approx(1.0)


@given(st.integers(1, 500), st.data())
def test_idf_monotone_nonnegative(n, data):
    d1 = data.draw(st.integers(1, n))
    d2 = data.draw(st.integers(d1, n))
    assert idf(n, d1) >= idf(n, d2) >= 0


_docs = st.lists(st.lists(st.sampled_from("abcdefg"), min_size=1, max_size=6), min_size=2, max_size=6)


@given(_docs)
def test_log_base_rescales_cosine_away(docs):
    vocab = build_vocabulary(docs)
    counts = count_matrix(docs, vocab)
    nat = weight_counts(counts, vocab.idf_table())
    dec = weight_counts(counts, np.log10(vocab.n_docs / vocab.df))
    for i in range(len(docs)):
        for j in range(len(docs)):
            a = cosine(row_vector(nat, i), row_vector(nat, j))
            b = cosine(row_vector(dec, i), row_vector(dec, j))
            assert a == pytest.approx(b, abs=1e-12)


@given(_docs)
def test_tfidf_entries_positive_sorted(docs):
    vocab = build_vocabulary(docs)
    for d in docs:
        v = tfidf_vector(d, vocab, vocab.idf_table())
        assert all(w > 0 for w in v.weights)
        assert list(v.indices) == sorted(set(v.indices))
