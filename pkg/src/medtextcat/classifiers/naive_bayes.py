import numpy as np

from ._base import NEGATIVE, POSITIVE, BinaryClassifier


class MultinomialNaiveBayes(BinaryClassifier):
    """Multinomial event model over raw term counts with additive smoothing.

    ``P(t | class) = (count(t, class) + alpha) / (total(class) + alpha * k)``,
    priors are class document fractions. Rows of ``feature_log_prob_`` and
    entries of ``class_log_prior_`` follow ``classes_`` = [-1, +1].
    """

    def __init__(self, alpha=1.0):
        self.alpha = alpha

    def fit(self, X, y):
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        X, y = self._validate_fit(X, y, require_both=True)
        k = X.shape[1]
        log_prob = np.empty((2, k))
        log_prior = np.empty(2)
        for row, cls in enumerate(self.classes_):
            mask = y == cls
            counts = np.asarray(X[mask].sum(axis=0)).ravel()
            log_prob[row] = np.log(counts + self.alpha) - np.log(counts.sum() + self.alpha * k)
            log_prior[row] = np.log(mask.sum() / len(y))
        self.feature_log_prob_ = log_prob
        self.class_log_prior_ = log_prior
        return self

    @property
    def feature_prob_(self):
        return np.exp(self.feature_log_prob_)

    def joint_log_likelihood(self, X):
        X = self._validate_predict(X, "feature_log_prob_")
        jll = X @ self.feature_log_prob_.T
        return np.asarray(jll) + self.class_log_prior_

    def predict(self, X):
        jll = self.joint_log_likelihood(X)
        return np.where(jll[:, 1] > jll[:, 0], POSITIVE, NEGATIVE)

    def summary(self):
        return {"alpha": self.alpha, "class_prior": np.exp(self.class_log_prior_).tolist()}
