"""Text normalization: lowercase, strip non-letters, tokenize, drop stopwords, stem."""

import re
from importlib import resources
from pathlib import Path

from sklearn.base import BaseEstimator, TransformerMixin

from .porter import porter_stem

_NON_LETTER = re.compile(r"[^a-z]+")


def normalize_tokenize(text):
    """Lowercase ``text``, treat every non-ASCII-letter as a separator and split.

    >>> normalize_tokenize("B-cell lymphoma-2")
    ['b', 'cell', 'lymphoma']
    """
    return _NON_LETTER.sub(" ", text.lower()).split()


def remove_stopwords(tokens, stops):
    return [t for t in tokens if t not in stops]


def parse_stopwords(lines):
    words = set()
    for line in lines:
        line = line.split("#", 1)[0].strip().lower()
        if line:
            words.add(line)
    return frozenset(words)


def load_stopwords(path=None):
    """Read a stopword file (one word per line, ``#`` comments).

    With no path, the bundled SMART English list is returned.
    """
    if path is None:
        text = resources.files("medtextcat.data").joinpath("smart_stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_stopwords(text.splitlines())


def pipeline(text, stops):
    """Full preprocessing chain. Stopwords are removed before stemming."""
    return [porter_stem(t) for t in remove_stopwords(normalize_tokenize(text), stops)]


class TextPreprocessor(BaseEstimator, TransformerMixin):
    """Stateless transformer mapping raw strings to stemmed token lists.

    Parameters
    ----------
    stopwords : iterable of str or None
        Active stopword set. ``None`` selects the bundled SMART list.
    """

    def __init__(self, stopwords=None):
        self.stopwords = stopwords

    def fit(self, X=None, y=None):
        self.stopwords_ = frozenset(self.stopwords) if self.stopwords is not None else load_stopwords()
        return self

    def transform(self, X):
        stops = getattr(self, "stopwords_", None)
        if stops is None:
            self.fit()
            stops = self.stopwords_
        return [pipeline(text, stops) for text in X]
