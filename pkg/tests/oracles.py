"""Slow, independent reference implementations used by the tests.

None of these import the package's solvers; they enumerate, grid-search or
run plain first-order methods so that agreement with the fast code means
something.
"""

import itertools

import numpy as np
from scipy.optimize import minimize


def central_diff(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        e = np.zeros_like(x)
        e[idx] = h
        g[idx] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def rel_err(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.linalg.norm(a - b) / max(1.0, np.linalg.norm(b)))


def project_simplex_sort(v):
    # textbook sort-and-threshold, kept apart from the package version
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, len(v) + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1), 0.0)


def sparsemax_by_support(theta):
    """Try every support size and keep the one that is self-consistent."""
    theta = np.asarray(theta, dtype=float)
    order = np.argsort(-theta)
    for k in range(len(theta), 0, -1):
        top = theta[order[:k]]
        tau = (top.sum() - 1) / k
        if np.all(top > tau) and (k == len(theta) or theta[order[k]] <= tau):
            return np.maximum(theta - tau, 0.0)
    raise AssertionError("no consistent support")


def paths(n, m):
    return list(itertools.product(range(m), repeat=n))


def path_score(theta, path):
    s = theta[0, path[0], 0]
    for t in range(1, len(path)):
        s += theta[t, path[t], path[t - 1]]
    return s


def path_indicator(path, m):
    y = np.zeros((len(path), m, m))
    y[0, path[0], 0] = 1.0
    for t in range(1, len(path)):
        y[t, path[t], path[t - 1]] = 1.0
    return y


def random_potentials(rng, n, m, scale=1.0):
    theta = rng.normal(scale=scale, size=(n, m, m))
    theta[0] = theta[0, :, :1]
    return theta


def brute_force_crf(theta):
    n, m, _ = theta.shape
    ps = paths(n, m)
    scores = np.array([path_score(theta, p) for p in ps])
    top = scores.max()
    log_z = top + np.log(np.sum(np.exp(scores - top)))
    w = np.exp(scores - log_z)
    marg = sum(wi * path_indicator(p, m) for wi, p in zip(w, ps))
    return marg, log_z


def distribution_space_projection(V, theta, iters=200000, tol=1e-13):
    """Minimize 0.5 |V^T p - theta|^2 over the simplex of path weights.

    Accelerated projected gradient with adaptive restart; stops when the
    Frank-Wolfe gap on the distribution simplex drops below ``tol``.
    """
    V = np.asarray(V, dtype=float)
    theta = np.asarray(theta, dtype=float).ravel()
    K = len(V)
    L = np.linalg.norm(V, 2) ** 2
    p = np.full(K, 1.0 / K)
    z, t = p.copy(), 1.0
    for _ in range(iters):
        grad = V @ (V.T @ z - theta)
        p_new = project_simplex_sort(z - grad / L)
        t_new = 0.5 * (1 + np.sqrt(1 + 4 * t * t))
        z = p_new + (t - 1) / t_new * (p_new - p)
        if (z - p_new) @ (p_new - p) > 0:  # restart
            z, t_new = p_new.copy(), 1.0
        p, t = p_new, t_new
        g = V @ (V.T @ p - theta)
        if g @ p - g.min() <= tol:
            break
    return V.T @ p, p


def pairwise_phi(kind):
    if kind == "hinge":
        return lambda t: np.maximum(1 + t, 0.0)
    if kind == "smoothed":
        return lambda t: np.where(t <= -1, 0.0, np.where(t >= 0, t + 0.5, 0.5 * (1 + t) ** 2))
    return lambda t: 0.5 * np.maximum(1 + t, 0.0) ** 2


def entropy_of_loss(kind, p, restarts=8, seed=0):
    """``min_theta sum_k p_k sum_{j != k} phi(theta_j)`` over ``sum(theta) = 0``.

    Nelder-Mead from several starts on the (d-1)-dimensional subspace.
    """
    phi = pairwise_phi(kind)
    p = np.asarray(p, dtype=float)
    d = len(p)
    # orthonormal basis of the sum-zero subspace
    Q = np.linalg.qr(np.eye(d) - 1.0 / d)[0][:, : d - 1]
    weights = 1.0 - p

    def objective(a):
        return float(weights @ phi(Q @ a))

    rng = np.random.default_rng(seed)
    best = np.inf
    for _ in range(restarts):
        res = minimize(objective, rng.normal(scale=2.0, size=d - 1), method="Nelder-Mead",
                       options=dict(xatol=1e-10, fatol=1e-13, maxiter=20000))
        best = min(best, res.fun)
    return best


def prox_by_slsqp(omega, tau, eta):
    """Generic prox over the simplex by SLSQP; good to about 1e-6."""
    eta = np.asarray(eta, dtype=float)
    d = len(eta)

    def f(mu):
        return 0.5 * np.sum((mu - eta) ** 2) + tau * omega(mu)

    res = minimize(f, np.full(d, 1.0 / d), method="SLSQP", bounds=[(0, 1)] * d,
                   constraints=[{"type": "eq", "fun": lambda mu: mu.sum() - 1}],
                   options=dict(ftol=1e-14, maxiter=1000))
    return res.x


def fista_distribution(omega_grad, theta, L, iters=20000, tol=1e-12):
    """Maximize <theta, p> - Omega(p) over the simplex by FISTA."""
    theta = np.asarray(theta, dtype=float)
    p = np.full(len(theta), 1.0 / len(theta))
    z, t = p.copy(), 1.0
    for _ in range(iters):
        p_new = project_simplex_sort(z + (theta - omega_grad(z)) / L)
        t_new = 0.5 * (1 + np.sqrt(1 + 4 * t * t))
        z = p_new + (t - 1) / t_new * (p_new - p)
        done = np.max(np.abs(p_new - p)) < tol
        p, t = p_new, t_new
        if done:
            break
    return p
