"""scikit-learn estimators wrapping the linear trainers."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.preprocessing import LabelEncoder
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .losses import js_divergence, parse_loss, regularized_prediction
from .training import Dataset, Regularizer, train_dual, train_primal

SOLVERS = ("proxgrad", "lbfgs", "dual")


class _LinearFY(BaseEstimator):
    def __init__(self, loss="tsallis:1.5", lam=1.0, l1_ratio=0.0, solver="lbfgs",
                 fit_intercept=True, max_iter=None, tol=None, random_state=None):
        self.loss = loss
        self.lam = lam
        self.l1_ratio = l1_ratio
        self.solver = solver
        self.fit_intercept = fit_intercept
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def _augment(self, X):
        if self.fit_intercept:
            return np.hstack([X, np.ones((X.shape[0], 1))])
        return X

    def _fit(self, X, Y):
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        self.loss_ = parse_loss(self.loss)
        G = Regularizer(self.lam, self.l1_ratio)
        data = Dataset(self._augment(X), Y)
        if self.solver == "dual":
            res = train_dual(data, self.loss_, G,
                             max_epochs=self.max_iter or 200,
                             tol=1e-4 if self.tol is None else self.tol,
                             random_state=self.random_state)
            self.duality_gap_ = res.gap
        else:
            res = train_primal(data, self.loss_, G, method=self.solver,
                               tol=1e-6 if self.tol is None else self.tol,
                               max_iter=self.max_iter or 20000)
        W = res.W
        if self.fit_intercept:
            self.coef_, self.intercept_ = W[:, :-1], W[:, -1]
        else:
            self.coef_, self.intercept_ = W, np.zeros(W.shape[0])
        self.objective_ = res.objective
        self.n_iter_ = res.iterations
        self.converged_ = res.converged
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X @ self.coef_.T + self.intercept_

    def _predict_simplex(self, X):
        return regularized_prediction(self.loss_, self.decision_function(X))[0]


class FenchelYoungClassifier(ClassifierMixin, _LinearFY):
    """Linear multiclass classifier trained with a Fenchel-Young loss.

    Parameters
    ----------
    loss : str
        Regularizer, e.g. ``"shannon"`` (logistic regression), ``"tsallis:2"``
        (sparsemax loss), ``"zero+zero-one"`` (multiclass hinge).
    lam : float
        Strength of the parameter regularization; the objective sums the
        per-sample losses, so ``lam`` scales with the data set size.
    l1_ratio : float
        l1 weight relative to ``lam``; needs ``solver="proxgrad"`` or
        ``"dual"`` when positive.
    solver : {"proxgrad", "lbfgs", "dual"}
    """

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self._encoder = LabelEncoder().fit(y)
        self.classes_ = self._encoder.classes_
        if len(self.classes_) < 2:
            raise ValueError("need at least two classes")
        Y = np.eye(len(self.classes_))[self._encoder.transform(y)]
        return self._fit(X, Y)

    def predict_proba(self, X):
        return self._predict_simplex(X)

    def predict(self, X):
        scores = self.decision_function(X)
        return self.classes_[np.argmax(scores, axis=1)]


class LabelProportionEstimator(_LinearFY):
    """Linear model predicting a distribution over ``d`` labels.

    ``fit`` takes targets ``Y`` whose rows lie on the simplex; ``predict``
    returns regularized predictions, which are sparse for Tsallis losses
    with ``alpha > 1``. ``score`` is the negative mean Jensen-Shannon
    divergence.
    """

    def fit(self, X, Y):
        X = check_array(X)
        Y = check_array(Y)
        if len(X) != len(Y):
            raise ValueError("X and Y have different numbers of rows")
        return self._fit(X, Y)

    def predict(self, X):
        return self._predict_simplex(X)

    def score(self, X, Y):
        return -float(np.mean(js_divergence(self.predict(X), Y)))
