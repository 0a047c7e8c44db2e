"""Regularized prediction functions onto the probability simplex.

Given scores ``theta`` and a generalized entropy ``H``, the prediction is the
maximizer of ``<theta, p> + H(p)`` over the simplex, and the maximal value is
the convex conjugate of ``-H`` at ``theta``.

Closed forms are used for argmax, softmax and sparsemax. Tsallis entropies
are handled by a one-dimensional root finding on the threshold ``tau`` of

    p_i(tau) = g'^{-1}(max(theta_i - tau, g'(0)))

where ``g = -h`` is the per-coordinate regularizer. Every other strictly
concave entropy falls back to projected gradient ascent, with sparsemax as
the projection.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from ._validation import check_positive, check_scores
from .entropies import EntropySpec, _grad_unchecked, entropy_value, parse_entropy
from .exceptions import NoConvergence
from .root_finding import RootResult, bisect, brent

METHODS = ("bisection", "brent", "projected-gradient")


@dataclass(frozen=True)
class SolverConfig:
    """Settings for the iterative predictors.

    ``max_iter=None`` resolves to 100 for the root finders and 10000 for
    projected gradient. ``step_size=None`` lets projected gradient pick
    ``1/L`` when a Lipschitz constant is known and 0.1 otherwise.
    """

    method: str = "bisection"
    tol: float = 1e-9
    max_iter: Optional[int] = None
    step_size: Optional[float] = None

    def __post_init__(self):
        method = self.method.lower().replace("_", "-")
        if method in ("pg", "projected_gradient"):
            method = "projected-gradient"
        if method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        object.__setattr__(self, "method", method)
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.step_size is not None:
            check_positive(self.step_size, "step_size")

    @property
    def iterations(self):
        if self.max_iter is not None:
            return self.max_iter
        return 10000 if self.method == "projected-gradient" else 100


@dataclass
class PredictionResult:
    """Output of a predictor.

    For a batch of score vectors ``p`` and ``conjugate_value`` are batched,
    ``iterations`` is the maximum over rows and ``function_evals`` the total.
    """

    p: np.ndarray
    conjugate_value: object
    iterations: int = 0
    function_evals: int = 0


def argmax_predict(theta):
    """One-hot encoding of the argmax, ties going to the lowest index."""
    theta = check_scores(theta, min_dim=1)
    p = np.zeros_like(theta)
    np.put_along_axis(p, np.argmax(theta, axis=-1)[..., None], 1.0, axis=-1)
    return p


def softmax(theta):
    theta = check_scores(theta, min_dim=1)
    z = np.exp(theta - theta.max(axis=-1, keepdims=True))
    return z / z.sum(axis=-1, keepdims=True)


def sparsemax(theta):
    """Euclidean projection onto the simplex by sorting.

    When the support is a single coordinate the exact vertex is returned.
    """
    theta = check_scores(theta, min_dim=1)
    d = theta.shape[-1]
    z = -np.sort(-theta, axis=-1)
    cssv = np.cumsum(z, axis=-1) - 1.0
    ks = np.arange(1, d + 1)
    support = np.sum(z - cssv / ks > 0, axis=-1, keepdims=True)
    tau = np.take_along_axis(cssv, support - 1, axis=-1) / support
    p = np.maximum(theta - tau, 0.0)
    p /= p.sum(axis=-1, keepdims=True)
    return np.where(support == 1, argmax_predict(theta), p)


def _tsallis_pieces(alpha):
    am1 = alpha - 1.0

    def g_prime(t):
        return (t ** am1 - 1.0) / am1

    def g_prime_inv(s):
        return np.maximum(1.0 + am1 * s, 0.0) ** (1.0 / am1)

    return g_prime, g_prime_inv, -1.0 / am1


def threshold_bracket(theta, g_prime):
    """Search interval for the threshold of a separable predictor."""
    d = theta.shape[-1]
    top = theta.max(axis=-1)
    return top - g_prime(1.0), top - g_prime(1.0 / d)


def solve_threshold(theta, g_prime, g_prime_inv, g_prime_zero, cfg, callback=None):
    """Find ``tau`` with ``sum_i p_i(tau) = 1`` and return ``(p, RootResult)``.

    ``theta`` can be 2-d; bisection then runs on all rows at once while Brent
    loops over rows. The result is renormalized to absorb the residual.
    """
    lo, hi = threshold_bracket(theta, g_prime)
    batched = theta.ndim == 2

    def mapping(tau, th):
        tau = np.asarray(tau, dtype=float)
        return g_prime_inv(np.maximum(th - tau[..., None], g_prime_zero))

    def phi(tau, th=theta):
        return mapping(tau, th).sum(axis=-1) - 1.0

    if cfg.method == "brent":
        rows = theta if batched else theta[None]
        los, his = np.atleast_1d(lo), np.atleast_1d(hi)
        results = []
        for th, a, b in zip(rows, los, his):
            if b - a <= 0:
                results.append(None)
                continue
            results.append(brent(lambda t, th=th: phi(t, th), a, b, cfg.tol,
                                 cfg.iterations, callback))
        tau = np.array([a if r is None else r.root for r, a in zip(results, los)])
        done = [r for r in results if r is not None]
        res = _merge(done, tau)
        if not batched:
            tau = tau[0]
    else:
        res = bisect(phi, lo, hi, cfg.tol, cfg.iterations, callback)
        tau = res.root

    if not res.converged and callback is None:
        raise NoConvergence(
            f"threshold search did not reach |sum(p) - 1| <= {cfg.tol:g} "
            f"in {cfg.iterations} iterations",
            residual=np.max(np.abs(res.residual)), iterations=res.iterations)

    p = mapping(tau, theta)
    p /= p.sum(axis=-1, keepdims=True)
    return p, res


def _merge(results, tau):
    if not results:
        return RootResult(tau, np.zeros_like(tau), 0, 0, True)
    return RootResult(
        tau,
        np.array([r.residual for r in results]),
        max(r.iterations for r in results),
        sum(r.function_evals for r in results),
        all(r.converged for r in results),
    )


def entmax_tsallis(theta, alpha, cfg=None, callback=None):
    """Tsallis-regularized prediction by root finding on the threshold.

    ``callback(tau)`` is forwarded to the root finder; when it is given, a
    run stopped early does not raise :class:`NoConvergence`.
    """
    theta = check_scores(theta)
    alpha = float(alpha)
    if not alpha > 1:
        raise ValueError(f"alpha must be > 1, got {alpha}")
    cfg = SolverConfig() if cfg is None else cfg
    if cfg.method == "projected-gradient":
        return predict_generic(EntropySpec.tsallis(alpha), theta, cfg)
    g_prime, g_prime_inv, g0 = _tsallis_pieces(alpha)
    p, res = solve_threshold(theta, g_prime, g_prime_inv, g0, cfg, callback)
    conj = np.sum(theta * p, axis=-1) + entropy_value(EntropySpec.tsallis(alpha), p)
    return PredictionResult(p, conj, res.iterations, res.function_evals)


def _lipschitz(H):
    if H.family == "tsallis" and H.alpha >= 2:
        return 1.0
    if H.family == "sqnorm" and H.q == 2:
        return 1.0
    return None


_PG_FAMILIES = ("shannon", "tsallis", "sqnorm", "renyi", "norm")


def predict_generic(H, theta, cfg=None, callback=None):
    """Maximize ``<theta, p> + H(p)`` by projected gradient ascent.

    A trial step is accepted when the gradient change along the step is
    consistent with the current step size, ``<g - g_new, p_new - p> <=
    |p_new - p|^2 / step``, and halved otherwise. This test needs no
    objective differences, which lose all precision near the optimum. After
    an accepted step the trial step doubles again. The run stops once an
    accepted step moves the iterate by less than ``cfg.tol``. Every gradient
    evaluation counts as a function evaluation.
    """
    H = parse_entropy(H)
    if H.family not in _PG_FAMILIES:
        raise ValueError(f"no prediction function available for {H}")
    theta = check_scores(theta)
    cfg = SolverConfig(method="projected-gradient") if cfg is None else cfg
    if theta.ndim == 2:
        out = [predict_generic(H, row, cfg, callback) for row in theta]
        return PredictionResult(np.array([r.p for r in out]),
                                np.array([r.conjugate_value for r in out]),
                                max(r.iterations for r in out),
                                sum(r.function_evals for r in out))

    floor = 1e-300 if H.family in ("shannon", "renyi") else 0.0

    def gradient(p):
        return theta + _grad_unchecked(H, np.maximum(p, floor))

    L = _lipschitz(H)
    step = cfg.step_size or (1.0 / L if L else 0.1)
    d = theta.shape[0]
    p = np.full(d, 1.0 / d)
    g = gradient(p)
    evals = 1
    converged = False
    moved = np.inf
    it = 0
    while it < cfg.iterations:
        it += 1
        while True:
            p_new = sparsemax(p + step * g)
            g_new = gradient(p_new)
            evals += 1
            diff = p_new - p
            if (g - g_new) @ diff <= diff @ diff / step or step < 1e-20:
                break
            step *= 0.5
        moved = np.linalg.norm(diff)
        p, g = p_new, g_new
        if callback is not None and callback(p):
            converged = True
            break
        if moved < cfg.tol:
            converged = True
            break
        if L is None or step < 1.0 / L:
            step *= 2.0
    if not converged and callback is None:
        raise NoConvergence(
            f"projected gradient did not converge in {cfg.iterations} iterations",
            residual=moved, iterations=it)
    conj = float(theta @ p + entropy_value(H, p))
    return PredictionResult(p, conj, it, evals)


def _default_config(H):
    if H.family in ("shannon", "tsallis"):
        return SolverConfig()
    return SolverConfig(method="projected-gradient")


def predict(H, theta, cfg=None):
    """Prediction ``argmax_p <theta, p> + H(p)`` over the simplex.

    Shannon and Tsallis with alpha=2 use their closed forms (softmax and
    sparsemax) unless projected gradient is requested explicitly. Other
    Tsallis entropies use ``cfg.method`` root finding; the remaining families
    are solved by projected gradient.
    """
    H = parse_entropy(H)
    theta = check_scores(theta)
    explicit_pg = cfg is not None and cfg.method == "projected-gradient"
    if H.family == "shannon" and not explicit_pg:
        return PredictionResult(softmax(theta), logsumexp(theta, axis=-1))
    if H.family == "tsallis":
        if explicit_pg:
            return predict_generic(H, theta, cfg)
        if H.alpha == 2:
            p = sparsemax(theta)
            conj = np.sum(theta * p, axis=-1) + 0.5 * (1.0 - np.sum(p * p, axis=-1))
            return PredictionResult(p, conj)
        return entmax_tsallis(theta, H.alpha, cfg)
    if cfg is not None and not explicit_pg:
        cfg = replace(cfg, method="projected-gradient", max_iter=None)
    return predict_generic(H, theta, cfg)


def conjugate_value(H, theta, cfg=None):
    """Convex conjugate of ``-H`` at ``theta``."""
    return predict(H, theta, cfg).conjugate_value


def temperature_predict(H, theta, t, cfg=None):
    """Prediction under the regularizer scaled by temperature ``t``.

    Returns ``predict(H, theta / t)``; the reported conjugate value is the
    one of the scaled regularizer, ``t * conj(theta / t)``.
    """
    t = check_positive(t, "t")
    theta = check_scores(theta)
    res = predict(H, theta / t, cfg)
    return PredictionResult(res.p, t * res.conjugate_value, res.iterations,
                            res.function_evals)
