"""Primal and dual training of linear models ``theta_i = W x_i``.

The primal problem is

    min_W  sum_i L(W x_i; y_i) + G(W),
    G(W) = lam / 2 |W|^2 + lam * rho * |W|_1

and its dual, over one regularized prediction ``mu_i`` per sample, is

    min_mu  D(mu) = sum_i Omega(mu_i) - Omega(y_i) + G*(V),
    V = (Y - mu)^T X.

Any pair satisfies weak duality ``P(W) >= -D(mu)``, and ``W = grad G*(V)``
recovers the primal solution from the dual one. Cost-sensitive losses use
``Omega(mu) - <c_y, mu>`` in place of ``Omega``.
"""

import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.optimize import minimize
from sklearn.exceptions import ConvergenceWarning

from ._validation import FEAS_TOL, check_positive, check_random_state
from .exceptions import InfeasibleDual
from .losses import fy_loss, omega_value, parse_loss, regularized_prediction
from .prox import prox, prox_spec_for


@dataclass
class Dataset:
    """Features ``X`` (n x p) and targets ``Y`` (n x d)."""

    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.Y = np.asarray(self.Y, dtype=float)
        if self.X.ndim != 2 or self.Y.ndim != 2 or len(self.X) != len(self.Y):
            raise ValueError(f"X and Y must be 2-d with equal rows, got {self.X.shape} and {self.Y.shape}")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.Y))):
            raise ValueError("dataset contains NaN or infinite entries")

    @property
    def n(self):
        return self.X.shape[0]


@dataclass(frozen=True)
class Regularizer:
    """``lam / 2 |W|^2 + lam * rho * |W|_1``; ``rho = 0`` is plain ridge."""

    lam: float
    rho: float = 0.0

    def __post_init__(self):
        check_positive(self.lam, "lam")
        if not self.rho >= 0 or not np.isfinite(self.rho):
            raise ValueError(f"rho must be nonnegative, got {self.rho}")

    def value(self, W):
        return 0.5 * self.lam * np.sum(W * W) + self.lam * self.rho * np.sum(np.abs(W))

    def grad_conjugate(self, V):
        return soft_threshold(V / self.lam, self.rho)

    def conjugate(self, V):
        W = self.grad_conjugate(V)
        return float(np.sum(W * V) - self.value(W))


def soft_threshold(x, threshold):
    return np.sign(x) * np.maximum(np.abs(x) - threshold, 0.0)


@dataclass
class DualState:
    """Dual variables with the cached ``V = (Y - mu)^T X`` and ``W = grad G*(V)``."""

    mu: np.ndarray
    V: np.ndarray
    W: np.ndarray

    @classmethod
    def at_targets(cls, data):
        d, p = data.Y.shape[1], data.X.shape[1]
        return cls(data.Y.copy(), np.zeros((d, p)), np.zeros((d, p)))

    def refresh(self, data, G):
        """Recompute the caches from ``mu``; returns the drift that was removed."""
        V = (data.Y - self.mu).T @ data.X
        drift = float(np.max(np.abs(V - self.V))) if self.V.size else 0.0
        self.V = V
        self.W = G.grad_conjugate(V)
        return drift


@dataclass
class TrainResult:
    W: np.ndarray
    objective: float
    iterations: int
    converged: bool
    history: List[float] = field(default_factory=list)
    gap: Optional[float] = None
    state: Optional[DualState] = None


def _scores(W, data):
    return data.X @ W.T


def primal_objective(W, data, loss, G):
    loss = parse_loss(loss)
    return float(np.sum(fy_loss(loss, _scores(W, data), data.Y)) + G.value(W))


def _smooth_part(W, data, loss, G):
    """Loss sum plus the ridge term, and its gradient."""
    theta = _scores(W, data)
    costs = loss.cost_vector(data.Y)
    shifted = theta + costs
    p, conj = regularized_prediction(loss, shifted)
    value = np.sum(conj + omega_value(loss, data.Y) - np.sum(shifted * data.Y, axis=1))
    value += 0.5 * G.lam * np.sum(W * W)
    grad = (p - data.Y).T @ data.X + G.lam * W
    return float(value), grad


def primal_gradient(W, data, loss, G):
    """``(Y_hat - Y)^T X + lam W``; only defined without the l1 term."""
    if G.rho:
        raise ValueError("the elastic-net objective is not differentiable")
    return _smooth_part(W, data, parse_loss(loss), G)[1]


def train_primal(data, loss, G, method="proxgrad", tol=1e-8, max_iter=20000, W0=None):
    """Minimize the primal objective.

    ``method="proxgrad"`` runs proximal gradient with backtracking; the l1
    part, if any, is handled by soft thresholding. A trial step is accepted
    when it passes both the sufficient-decrease test (with a relative slack
    of 1e-12 for rounding) and the matching curvature test on gradients.
    The run stops when the gradient mapping has sup norm at most ``tol``,
    which for ridge is the gradient itself.

    ``method="lbfgs"`` calls L-BFGS-B with 10 correction pairs; it needs
    ``rho = 0``.

    Hitting ``max_iter`` emits a ``ConvergenceWarning``; it is not an error.
    """
    loss = parse_loss(loss)
    d, p = data.Y.shape[1], data.X.shape[1]
    W = np.zeros((d, p)) if W0 is None else np.array(W0, dtype=float)

    if method == "lbfgs":
        if G.rho:
            raise ValueError("L-BFGS needs a smooth regularizer (rho = 0)")

        def fun(w):
            f, g = _smooth_part(w.reshape(d, p), data, loss, G)
            return f, g.ravel()

        res = minimize(fun, W.ravel(), jac=True, method="L-BFGS-B",
                       options=dict(maxcor=10, gtol=tol, ftol=1e-15, maxiter=max_iter))
        W = res.x.reshape(d, p)
        grad_norm = float(np.max(np.abs(res.jac)))
        converged = bool(res.success) or grad_norm <= tol
        if not converged:
            warnings.warn(f"L-BFGS stopped with gradient sup norm {grad_norm:.3g} ({res.message})",
                          ConvergenceWarning)
        return TrainResult(W, primal_objective(W, data, loss, G), int(res.nit), converged)
    if method != "proxgrad":
        raise ValueError(f"method must be 'proxgrad' or 'lbfgs', got {method!r}")

    threshold = G.lam * G.rho
    f, g = _smooth_part(W, data, loss, G)
    # 1 / L for losses with 1-Lipschitz gradient in theta
    step = 1.0 / (np.linalg.norm(data.X, 2) ** 2 + G.lam)
    history = [f + threshold * np.sum(np.abs(W))]
    converged = False
    mapping = np.inf
    it = 0
    while it < max_iter:
        if not threshold and np.max(np.abs(g)) <= tol:
            converged = True
            break
        it += 1
        while True:
            W_new = soft_threshold(W - step * g, step * threshold)
            f_new, g_new = _smooth_part(W_new, data, loss, G)
            delta = W_new - W
            sq = np.sum(delta * delta)
            decrease = f_new <= f + np.sum(g * delta) + sq / (2 * step) + 1e-12 * abs(f)
            curvature = np.sum((g_new - g) * delta) <= sq / step
            if (decrease and curvature) or step < 1e-20:
                break
            step *= 0.5
        mapping = np.max(np.abs(delta)) / step
        W, f, g = W_new, f_new, g_new
        history.append(f + threshold * np.sum(np.abs(W)))
        if threshold and mapping <= tol:
            converged = True
            break
        step *= 1.25
    if not converged:
        norm = np.max(np.abs(g)) if not threshold else mapping
        warnings.warn(f"proximal gradient stopped after {max_iter} iterations with "
                      f"gradient sup norm {norm:.3g}", ConvergenceWarning)
    return TrainResult(W, history[-1], it, converged, history)


def _check_feasible(loss, mu):
    if not loss.on_simplex:
        return
    if np.any(mu < -FEAS_TOL) or np.any(np.abs(mu.sum(axis=1) - 1) > FEAS_TOL):
        raise InfeasibleDual("dual variables left the simplex")


def dual_objective(state, data, loss, G):
    """``D(mu)``, computed from ``mu`` alone (the caches are not used)."""
    loss = parse_loss(loss)
    _check_feasible(loss, state.mu)
    costs = loss.cost_vector(data.Y)
    psi_mu = omega_value(loss, state.mu) - np.sum(costs * state.mu, axis=1)
    psi_y = omega_value(loss, data.Y) - np.sum(costs * data.Y, axis=1)
    V = (data.Y - state.mu).T @ data.X
    return float(np.sum(psi_mu - psi_y) + G.conjugate(V))


def dual_ca_step(state, i, data, loss, G, prox_spec=None):
    """Exact block update of ``mu_i`` on the quadratic upper model of ``G*``.

    With ``sigma = |x_i|^2 / lam`` the new block is
    ``prox_{Omega / sigma}(mu_i + W x_i / sigma)``; the caches are updated in
    O(dp). The state is modified in place and returned.
    """
    loss = parse_loss(loss)
    x = data.X[i]
    sq = float(x @ x)
    if sq == 0.0:
        return state
    prox_spec = prox_spec or prox_spec_for(loss)
    sigma = sq / G.lam
    eta = state.mu[i] + (state.W @ x) / sigma
    if loss.cost is not None:
        eta = eta + loss.cost_vector(data.Y[i]) / sigma
    new = prox(prox_spec, 1.0 / sigma, eta)
    delta = new - state.mu[i]
    state.mu[i] = new
    state.V -= np.outer(delta, x)
    if G.rho:
        state.W = G.grad_conjugate(state.V)
    else:
        state.W -= np.outer(delta, x) / G.lam
    return state


def recover_primal(state, G):
    return G.grad_conjugate(state.V)


def duality_gap(W, state, data, loss, G):
    return primal_objective(W, data, loss, G) + dual_objective(state, data, loss, G)


def train_dual(data, loss, G, max_epochs=200, tol=1e-4, random_state=0):
    """Dual coordinate ascent with blocks drawn uniformly with replacement.

    An epoch is ``n`` block updates. After every epoch the caches are
    recomputed from ``mu`` and the duality gap is evaluated; the run stops
    once it is at most ``tol``. ``history`` records the gap per epoch.
    """
    loss = parse_loss(loss)
    rng = check_random_state(random_state)
    spec = prox_spec_for(loss)
    state = DualState.at_targets(data)
    history = []
    gap = np.inf
    epoch = 0
    while epoch < max_epochs:
        epoch += 1
        for i in rng.integers(data.n, size=data.n):
            dual_ca_step(state, i, data, loss, G, spec)
        state.refresh(data, G)
        gap = duality_gap(state.W, state, data, loss, G)
        history.append(gap)
        if gap <= tol:
            break
    converged = gap <= tol
    if not converged:
        warnings.warn(f"dual coordinate ascent stopped after {max_epochs} epochs with "
                      f"duality gap {gap:.3g}", ConvergenceWarning)
    W = recover_primal(state, G)
    return TrainResult(W, primal_objective(W, data, loss, G), epoch, converged,
                       history, gap, state)
