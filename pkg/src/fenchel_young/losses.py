"""Fenchel-Young losses over the simplex and their companions.

For a regularizer ``Omega`` with conjugate ``Omega*`` the loss is

    L(theta; y) = Omega*(theta) + Omega(y) - <theta, y>

and its gradient in ``theta`` is ``y_hat(theta) - y`` where ``y_hat`` is the
regularized prediction. Regularizers are the negated entropies of
:mod:`fenchel_young.entropies`, plus two special cases:

* ``"zero"``: the indicator of the simplex, giving the perceptron loss;
* ``"squared"``: ``0.5 * |mu|^2`` on all of R^d, giving the squared loss.

A cost vector turns the loss into ``L(theta + c_y; y)``, the cost-sensitive
version; the 0/1 cost is ``c_y = 1 - y``.
"""

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.special import xlogy

from ._validation import as_target, check_scores
from .entropies import EntropySpec, entropy_value, parse_entropy
from .simplex import SolverConfig, argmax_predict, predict

SPECIAL = ("zero", "squared")
BINARY_KINDS = ("logistic", "modified-huber", "smoothed-hinge")


@dataclass(frozen=True)
class LossSpec:
    """Regularizer, optional cost and solver settings defining a loss.

    ``cost`` is None, ``"zero-one"`` or a fixed nonnegative vector.
    """

    omega: Union[EntropySpec, str]
    cost: Optional[object] = None
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        omega = self.omega
        if isinstance(omega, str):
            omega = omega.lower()
            if omega in ("perceptron",):
                omega = "zero"
            if omega not in SPECIAL:
                omega = parse_entropy(omega)
        object.__setattr__(self, "omega", omega)
        cost = self.cost
        if cost is not None and not (isinstance(cost, str) and cost == "zero-one"):
            cost = np.asarray(cost, dtype=float)
            if cost.ndim != 1 or not np.all(np.isfinite(cost)) or np.any(cost < 0):
                raise ValueError("cost must be a finite nonnegative vector or 'zero-one'")
            cost = tuple(cost)
        object.__setattr__(self, "cost", cost)

    @property
    def on_simplex(self):
        return self.omega != "squared"

    def cost_vector(self, y):
        """The cost ``c_y`` for target ``y`` (zeros when no cost is set)."""
        if self.cost is None:
            return np.zeros_like(y)
        if self.cost == "zero-one":
            return 1.0 - y
        return np.broadcast_to(np.asarray(self.cost), y.shape)

    def __str__(self):
        name = str(self.omega)
        if self.cost == "zero-one":
            name += "+zero-one"
        elif self.cost is not None:
            name += "+cost"
        return name


def parse_loss(text, cost=None, solver=None):
    """Build a :class:`LossSpec` from its textual form.

    Accepts any entropy string, ``zero`` (perceptron) and ``squared``; a
    ``+zero-one`` suffix is shorthand for ``cost="zero-one"``.
    """
    if isinstance(text, LossSpec):
        return text
    base, plus, suffix = text.partition("+")
    if plus:
        if suffix != "zero-one":
            raise ValueError(f"unknown cost suffix {suffix!r}")
        cost = "zero-one"
    return LossSpec(base, cost, solver or SolverConfig())


def cost_augment(spec, c="zero-one"):
    """Cost-sensitive version of ``spec``; ``c`` is ``"zero-one"`` or a vector."""
    spec = parse_loss(spec)
    return LossSpec(spec.omega, c, spec.solver)


def _check_target(spec, y, d):
    y = as_target(y) if spec.on_simplex else np.asarray(y, dtype=float)
    if y.shape[-1] != d:
        raise ValueError(f"target has {y.shape[-1]} entries, scores have {d}")
    return y


def omega_value(spec, mu):
    """Regularizer value ``Omega(mu)``, ignoring any cost term."""
    spec = parse_loss(spec)
    if spec.omega == "squared":
        mu = np.asarray(mu, dtype=float)
        return 0.5 * np.sum(mu * mu, axis=-1)
    mu = as_target(mu, name="mu")
    if spec.omega == "zero":
        return np.zeros(mu.shape[:-1]) if mu.ndim > 1 else 0.0
    return -entropy_value(spec.omega, mu)


def regularized_prediction(spec, theta):
    """Return ``(y_hat(theta), Omega*(theta))`` for the regularizer of ``spec``.

    The cost term is not applied here.
    """
    spec = parse_loss(spec)
    theta = check_scores(theta, min_dim=1)
    if spec.omega == "squared":
        return theta.copy(), 0.5 * np.sum(theta * theta, axis=-1)
    if spec.omega == "zero":
        return argmax_predict(theta), theta.max(axis=-1)
    res = predict(spec.omega, theta, spec.solver)
    return res.p, res.conjugate_value


def fy_loss(spec, theta, y):
    """Loss value; batched over leading axes of ``theta`` and ``y``.

    Rounding can leave tiny negative values; the result is clipped at zero.
    """
    spec = parse_loss(spec)
    theta = check_scores(theta, min_dim=1)
    y = _check_target(spec, y, theta.shape[-1])
    theta = theta + spec.cost_vector(y)
    _, conj = regularized_prediction(spec, theta)
    loss = conj + omega_value(spec, y) - np.sum(theta * y, axis=-1)
    loss = np.maximum(loss, 0.0)
    return loss if np.ndim(loss) else float(loss)


def fy_loss_grad(spec, theta, y):
    """Gradient ``y_hat(theta + c_y) - y``.

    For the perceptron it is the argmax vertex residual, a subgradient.
    """
    spec = parse_loss(spec)
    theta = check_scores(theta, min_dim=1)
    y = _check_target(spec, y, theta.shape[-1])
    p, _ = regularized_prediction(spec, theta + spec.cost_vector(y))
    return p - y


def fy_loss_and_grad(spec, theta, y):
    spec = parse_loss(spec)
    theta = check_scores(theta, min_dim=1)
    y = _check_target(spec, y, theta.shape[-1])
    theta = theta + spec.cost_vector(y)
    p, conj = regularized_prediction(spec, theta)
    loss = np.maximum(conj + omega_value(spec, y) - np.sum(theta * y, axis=-1), 0.0)
    return (loss if np.ndim(loss) else float(loss)), p - y


def binary_loss(kind, s, y):
    """Margin loss of score ``s`` for label ``y`` in {-1, +1}.

    Written in terms of ``u = -y * s``:

    * ``logistic``: ``log(1 + exp(u))``
    * ``modified-huber``: 0 for ``u <= -1``, ``u`` for ``u >= 1``,
      ``(u + 1)^2 / 4`` in between
    * ``smoothed-hinge``: 0 for ``u <= -1``, ``u + 1/2`` for ``u >= 0``,
      ``(1 + u)^2 / 2`` in between
    """
    kind = kind.lower().replace("_", "-")
    if kind not in BINARY_KINDS:
        raise ValueError(f"kind must be one of {BINARY_KINDS}, got {kind!r}")
    y = np.asarray(y, dtype=float)
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("binary labels must be -1 or +1")
    u = -y * np.asarray(s, dtype=float)
    if kind == "logistic":
        out = np.logaddexp(0.0, u)
    elif kind == "modified-huber":
        out = np.where(u <= -1, 0.0, np.where(u >= 1, u, 0.25 * (u + 1) ** 2))
    else:
        out = np.where(u <= -1, 0.0, np.where(u >= 0, u + 0.5, 0.5 * (1 + u) ** 2))
    return out if np.ndim(out) else float(out)


def expected_loss(spec, theta, p):
    """``sum_i p_i L(theta; e_i)``, evaluated term by term."""
    spec = parse_loss(spec)
    theta = check_scores(theta)
    p = as_target(p, name="p")
    d = theta.shape[-1]
    return float(sum(p[i] * fy_loss(spec, theta, np.eye(d)[i])
                     for i in range(d) if p[i] > 0))


def bregman_information(spec, p):
    """``E_p[Omega(Y)] - Omega(E_p[Y])`` for ``Y`` drawn from the vertices."""
    spec = parse_loss(spec)
    p = as_target(p, name="p")
    d = p.shape[-1]
    at_vertices = np.array([omega_value(spec, np.eye(d)[i]) for i in range(d)])
    return float(p @ at_vertices - omega_value(spec, p))


def margin_holds(theta, k, m):
    """True when ``theta[k] >= m + max_{j != k} theta[j]``."""
    theta = check_scores(theta)
    others = np.delete(theta, k)
    return bool(theta[k] >= m + others.max())


def kl_divergence(y, q):
    """``KL(y || q)`` with the convention ``0 log 0 = 0``."""
    y = np.asarray(y, dtype=float)
    q = np.asarray(q, dtype=float)
    return np.sum(xlogy(y, y) - xlogy(y, q), axis=-1)


def js_divergence(p, y):
    """Jensen-Shannon divergence between rows of ``p`` and ``y``, in nats."""
    p = np.asarray(p, dtype=float)
    y = np.asarray(y, dtype=float)
    m = 0.5 * (p + y)
    js = 0.5 * (kl_divergence(p, m) + kl_divergence(y, m))
    return np.clip(js, 0.0, np.log(2))
