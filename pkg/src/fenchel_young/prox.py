"""Proximity operators of output regularizers.

``prox(spec, tau, eta)`` returns

    argmin_mu  0.5 * |mu - eta|^2 + tau * Omega(mu)

For the quadratic and polyhedral regularizers this is a closed form built
on the simplex projection. For the negative Shannon and Tsallis-1.5
entropies on the simplex, the problem is separable up to the unit-sum
constraint, and reduces to a one-dimensional root finding on a threshold
``nu``:

    mu_i(nu) = g'^{-1}(max(eta_i - nu, g'(0))),   g(t) = t^2 / 2 - tau * h(t)

Some references write this operator with ``sigma = 1 / tau`` as
``prox_{-H / sigma}``; the two parameterizations are the same.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._validation import check_positive, check_scores
from .entropies import EntropySpec
from .exceptions import NoConvergence
from .simplex import SolverConfig, predict, solve_threshold, sparsemax

KINDS = ("squared", "perceptron", "sparsemax", "cost-hinge", "shannon", "tsallis15")


@dataclass(frozen=True)
class ProxSpec:
    """Regularizer whose proximity operator is requested.

    ``cost`` is required for ``cost-hinge``, where the regularizer is
    ``-<cost, mu>`` restricted to the simplex.
    """

    kind: str
    cost: Optional[tuple] = None

    def __post_init__(self):
        kind = self.kind.lower().replace("_", "-")
        if kind == "tsallis-1.5":
            kind = "tsallis15"
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "cost-hinge":
            if self.cost is None:
                raise ValueError("cost-hinge needs a cost vector")
            cost = np.asarray(self.cost, dtype=float)
            if cost.ndim != 1 or np.any(cost < 0) or not np.all(np.isfinite(cost)):
                raise ValueError("cost must be a finite nonnegative vector")
            object.__setattr__(self, "cost", tuple(cost))


def _spec(spec):
    return ProxSpec(spec) if isinstance(spec, str) else spec


def wright_omega(z, tol=1e-12, max_iter=100):
    """Solve ``w + log(w) = z`` for ``w > 0``, elementwise.

    Newton's method in the multiplicative form
    ``w <- w (1 - log w + z) / (1 + w)``, started from ``exp(z)`` for
    ``z < 1`` and from ``z`` otherwise. An iterate that leaves the positive
    half-line is replaced by the midpoint with its last valid value.
    """
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise ValueError("wright_omega needs finite arguments")
    # below this, exp(z) underflows and so does the answer
    tiny = z < -700.0
    zz = np.where(tiny, 0.0, z)
    w = np.where(zz < 1, np.exp(np.minimum(zz, 1.0)), zz)
    for _ in range(max_iter):
        w_new = w * (1.0 - np.log(w) + zz) / (1.0 + w)
        w_new = np.where(w_new > 0, w_new, 0.5 * w)
        # quadratic convergence: once a step is this small the error is far below it
        done = np.all(np.abs(w_new - w) <= 1e-10 * w)
        w = w_new
        if done:
            break
    resid = np.abs(w + np.log(w) - zz)
    if np.any(resid > tol * np.maximum(1.0, np.abs(zz))):
        raise NoConvergence("wright_omega did not converge", residual=resid.max())
    w = np.where(tiny, 0.0, w)
    return w if w.ndim else float(w)


def _shannon_pieces(tau):
    # g(t) = t^2 / 2 + tau * t log t
    def g_prime(t):
        return t + tau * (np.log(t) + 1.0)

    def g_prime_inv(x):
        return tau * wright_omega(x / tau - 1.0 - np.log(tau))

    return g_prime, g_prime_inv, -np.inf


def _tsallis15_pieces(tau):
    # g'(t) = t + 2 tau sqrt(t), up to a constant absorbed by the threshold;
    # its inverse is (sqrt(tau^2 + x) - tau)^2, written without cancellation
    def g_prime(t):
        return t + 2.0 * tau * np.sqrt(t)

    def g_prime_inv(x):
        x = np.maximum(x, 0.0)
        return (x / (np.sqrt(tau * tau + x) + tau)) ** 2

    return g_prime, g_prime_inv, 0.0


def prox(spec, tau, eta, cfg=None):
    """Proximity operator of ``tau * Omega`` at ``eta``.

    ``tau=0`` is accepted and returns the projection onto the domain.
    ``cfg`` sets the root finding used by the entropic regularizers; its
    default tolerance is 1e-12 on the unit-sum residual.
    """
    spec = _spec(spec)
    eta = check_scores(eta, name="eta", min_dim=1)
    tau = float(tau)
    if not tau >= 0 or not np.isfinite(tau):
        raise ValueError(f"tau must be nonnegative, got {tau}")
    kind = spec.kind
    if kind == "squared":
        return eta / (tau + 1.0)
    if kind == "perceptron" or tau == 0:
        return sparsemax(eta)
    if kind == "sparsemax":
        return sparsemax(eta / (tau + 1.0))
    if kind == "cost-hinge":
        return sparsemax(eta + tau * np.asarray(spec.cost))
    cfg = cfg or SolverConfig(method="brent", tol=1e-12)
    pieces = _shannon_pieces if kind == "shannon" else _tsallis15_pieces
    g_prime, g_prime_inv, g0 = pieces(tau)
    p, _ = solve_threshold(eta, g_prime, g_prime_inv, g0, cfg)
    return p


def _conjugate_prediction(kind, theta):
    if kind == "squared":
        return theta
    if kind == "shannon":
        return predict(EntropySpec.shannon(), theta).p
    if kind == "tsallis15":
        return predict(EntropySpec.tsallis(1.5), theta,
                       SolverConfig(method="brent", tol=1e-13)).p
    return sparsemax(theta)


def moreau_decompose(spec, tau, eta, tol=1e-12, max_iter=100000):
    """Proximity operator of ``tau * Omega`` through the conjugate.

    Uses ``prox_{tau Omega}(eta) = eta - tau * u`` where ``u`` minimizes
    ``0.5 * |u - eta / tau|^2 + Omega*(u) / tau``. That inner problem is
    smooth, with gradient ``u - eta / tau + y_hat(u) / tau``, and strongly
    convex; it is solved by Nesterov's accelerated gradient with constant
    momentum, stopping when the gradient norm drops below ``tol``.

    The polyhedral regularizers (perceptron, cost-hinge) have a non-smooth
    conjugate. Their prox is a simplex projection, which is unchanged by
    scaling, so it equals the prox of ``tau * (I + |.|^2 / 2)`` at
    ``(1 + tau) * eta'`` with ``eta' = eta`` (plus ``tau * cost``). That
    regularizer is handled by the smooth route above.
    """
    spec = _spec(spec)
    tau = check_positive(tau, "tau")
    eta = check_scores(eta, name="eta", min_dim=1)
    kind = spec.kind
    if kind in ("perceptron", "cost-hinge"):
        shifted = eta if kind == "perceptron" else eta + tau * np.asarray(spec.cost)
        return moreau_decompose(ProxSpec("sparsemax"), tau, (1.0 + tau) * shifted,
                                tol, max_iter)

    target = eta / tau
    L = 1.0 + 1.0 / tau
    mu = 1.0
    momentum = (np.sqrt(L) - np.sqrt(mu)) / (np.sqrt(L) + np.sqrt(mu))
    u = target.copy()
    u_prev = u
    for _ in range(max_iter):
        v = u + momentum * (u - u_prev)
        grad = v - target + _conjugate_prediction(kind, v) / tau
        u_prev, u = u, v - grad / L
        g_u = u - target + _conjugate_prediction(kind, u) / tau
        if np.linalg.norm(g_u) <= tol:
            break
    else:
        raise NoConvergence("Moreau route did not converge", residual=np.linalg.norm(g_u))
    return eta - tau * u


def prox_spec_for(loss_spec):
    """The :class:`ProxSpec` matching a loss regularizer, ignoring costs.

    Cost-sensitive losses are handled by the caller through
    ``prox_{tau (Omega - <c, .>)}(eta) = prox_{tau Omega}(eta + tau * c)``.
    """
    omega = loss_spec.omega
    if omega == "squared":
        return ProxSpec("squared")
    if omega == "zero":
        return ProxSpec("perceptron")
    if omega.family == "shannon":
        return ProxSpec("shannon")
    if omega.family == "tsallis" and omega.alpha == 2:
        return ProxSpec("sparsemax")
    if omega.family == "tsallis" and omega.alpha == 1.5:
        return ProxSpec("tsallis15")
    raise NotImplementedError(f"no proximity operator available for {omega}")
