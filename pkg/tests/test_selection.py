import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from medtextcat.selection import (
    ChiSquareSelector,
    ContingencyTable,
    chi_square,
    chi_square_scores,
    contingency,
    rank_features,
    select_top_k,
)
from medtextcat.vectors import build_vocabulary, count_matrix
from oracles import chi_square_expected


def test_contingency_counts():
    tokens = [["t"], ["t", "u"], ["u"], ["v"]]
    labels = [{"A"}, {"A"}, {"B"}, {"B"}]
    assert contingency("t", "A", tokens, labels) == (2, 0, 0, 2)
    assert contingency("t", "A", tokens, labels).n == 4
    assert contingency("zzz", "A", tokens, labels)[::2] == (0, 0)


def test_contingency_multilabel_positive_for_both():
    tokens = [["t"], ["u"]]
    labels = [{"A", "B"}, {"C"}]
    assert contingency("t", "A", tokens, labels).a == 1
    assert contingency("t", "B", tokens, labels).a == 1


def test_contingency_unknown():
    vocab = build_vocabulary([["t"]])
    with pytest.raises(KeyError):
        contingency("t", "nope", [["t"]], [{"A"}])
    with pytest.raises(KeyError):
        contingency("q", "A", [["t"]], [{"A"}], vocab=vocab)


@pytest.mark.parametrize(
    "table, expected",
    [
        ((10, 20, 30, 60), 0.0),  # ad == bc
        ((30, 20, 10, 40), 100 * (1200 - 200) ** 2 / (40 * 60 * 50 * 50)),  # 16.666...
        ((2, 0, 0, 2), 4.0),
        ((0, 5, 0, 5), 0.0),  # term absent: zero margin guard
        ((3, 0, 4, 0), 0.0),  # term everywhere
    ],
)
def test_chi_square_examples(table, expected):
    assert chi_square(ContingencyTable(*table)) == pytest.approx(expected, abs=1e-12)
    assert chi_square_expected(*table) == pytest.approx(expected, abs=1e-12)


_count = st.integers(0, 200)


@given(_count, _count, _count, _count)
def test_chi_square_matches_pearson(a, b, c, d):
    if a + b + c + d == 0:
        return
    assert chi_square(ContingencyTable(a, b, c, d)) == pytest.approx(chi_square_expected(a, b, c, d), abs=1e-9, rel=1e-12)


@given(_count, _count, _count, _count)
def test_chi_square_label_swap(a, b, c, d):
    assert chi_square(ContingencyTable(a, b, c, d)) == pytest.approx(chi_square(ContingencyTable(c, d, a, b)), rel=1e-12)


@given(_count, _count, _count, _count)
def test_vectorized_matches_scalar(a, b, c, d):
    assert chi_square_scores([a], [b], [c], [d])[0] == pytest.approx(chi_square(ContingencyTable(a, b, c, d)), rel=1e-12)


def _rank(docs, labels, category):
    vocab = build_vocabulary(docs)
    return vocab, rank_features(category, vocab, count_matrix(docs, vocab), labels)


def test_rank_perfect_before_independent():
    docs = [["t1", "t2"], ["t1"], ["t2"], []]
    labels = [{"A"}, {"A"}, {"B"}, {"B"}]
    _, ranking = _rank(docs, labels, "A")
    assert ranking.scored[0] == ("t1", 4.0)
    assert ranking.scored[1] == ("t2", 0.0)


def test_rank_tie_lexicographic():
    docs = [["zeta", "alpha"], ["zeta", "alpha"], ["q"]]
    labels = [{"A"}, {"A"}, {"B"}]
    _, ranking = _rank(docs, labels, "A")
    # every term separates the classes perfectly, so all three scores tie
    assert ranking.terms == ["alpha", "q", "zeta"]
    assert len({s for _, s in ranking.scored}) == 1


def test_rank_toy_three_docs():
    docs = [["x"], ["y"], ["y"]]
    labels = [{"P"}, {"N"}, {"N"}]
    expected = {t: chi_square_expected(*contingency(t, "P", docs, labels)) for t in ("x", "y")}
    # brute force gives 3.0 for both terms; the tie falls to lexicographic order
    assert expected == {"x": pytest.approx(3.0), "y": pytest.approx(3.0)}
    _, ranking = _rank(docs, labels, "P")
    assert ranking.scored == (("x", pytest.approx(3.0)), ("y", pytest.approx(3.0)))


def test_select_top_k():
    docs = [["a", "b", "c"], ["a"], ["c"], ["b"]]
    labels = [{"A"}, {"A"}, {"B"}, {"B"}]
    vocab, ranking = _rank(docs, labels, "A")
    full = select_top_k(ranking, 10, vocab)
    assert list(full.terms) == ranking.terms
    one = select_top_k(ranking, 1, vocab)
    assert one.terms == ("a",)
    assert one.remap == {vocab.index["a"]: 0}
    with pytest.raises(ValueError):
        select_top_k(ranking, 0, vocab)


_corpus = st.lists(
    st.tuples(st.lists(st.sampled_from("abcdefghij"), min_size=1, max_size=5), st.booleans()),
    min_size=2,
    max_size=12,
)


@given(_corpus, st.integers(1, 10), st.integers(1, 10))
def test_top_k_prefix(rows, k1, k2):
    k1, k2 = sorted((k1, k2))
    docs = [d for d, _ in rows]
    labels = [{"A"} if pos else {"B"} for _, pos in rows]
    if not any(pos for _, pos in rows):
        labels[0] = {"A"}
    vocab, ranking = _rank(docs, labels, "A")
    small = select_top_k(ranking, k1, vocab).terms
    large = select_top_k(ranking, k2, vocab).terms
    assert large[: len(small)] == small
    scores = [s for _, s in ranking.scored]
    assert scores == sorted(scores, reverse=True)
    assert all(s >= 0 for s in scores)


def test_selector_estimator_agrees_with_ranking():
    docs = [["a", "b", "c"], ["a", "d"], ["c"], ["b", "d"], ["a"]]
    labels = [{"A"}, {"A"}, {"B"}, {"B"}, {"A"}]
    vocab, ranking = _rank(docs, labels, "A")
    X = count_matrix(docs, vocab)
    y = np.array([1 if "A" in l else -1 for l in labels])
    sel = ChiSquareSelector(k=3).fit(X, y)
    assert [vocab.terms[j] for j in sel.get_support(indices=True)] == ranking.terms[:3]
    assert sel.transform(X).shape == (5, 3)
    assert sel.get_support().sum() == 3
