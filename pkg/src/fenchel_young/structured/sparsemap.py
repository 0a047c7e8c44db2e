"""MAP oracles and the SparseMAP projection built on them.

An oracle only has to return a vertex maximizing ``<theta, y>``; SparseMAP
then computes the Euclidean projection of ``theta`` onto the convex hull of
the vertices, together with a sparse convex combination reaching it.
"""

import itertools

import numpy as np

from ..exceptions import NoConvergence
from .permutahedron import PermutahedronSpec, permutahedron_map
from .sequence import _viterbi, enumerate_paths, path_to_tensor
from .types import StructureVector


class MapOracle:
    """Base class. ``shape`` is the shape of scores and vertices."""

    shape = None

    def map(self, theta):
        raise NotImplementedError

    def vertices(self):
        """All vertices in lexicographic order, for small test instances."""
        raise NotImplementedError

    def __call__(self, theta):
        y = self.map(theta)
        return y, float(np.sum(theta * y))


class SimplexOracle(MapOracle):
    def __init__(self, d):
        self.shape = (d,)

    def map(self, theta):
        y = np.zeros(self.shape)
        y[np.argmax(theta)] = 1.0
        return y

    def vertices(self):
        return np.eye(self.shape[0])


class SequenceOracle(MapOracle):
    """Viterbi decoding of ``n``-step paths over ``m`` states."""

    def __init__(self, n, m):
        self.n, self.m = n, m
        self.shape = (n, m, m)

    def map(self, theta):
        path, _ = _viterbi(np.asarray(theta, dtype=float).reshape(self.shape))
        return path_to_tensor(path, self.m)

    def vertices(self):
        return np.array([path_to_tensor(p, self.m) for p in enumerate_paths(self.n, self.m)])


class PermutationOracle(MapOracle):
    def __init__(self, w):
        self.spec = w if isinstance(w, PermutahedronSpec) else PermutahedronSpec(w)
        self.shape = (len(self.spec.w),)

    def map(self, theta):
        return permutahedron_map(self.spec, theta)

    def vertices(self):
        w = self.spec.array
        perms = sorted(set(itertools.permutations(range(len(w)))))
        verts = {tuple(w[list(p)]) for p in perms}
        return np.array(sorted(verts))


class EnumerationOracle(MapOracle):
    """Brute force over an explicit list of vertices; ties go to the first."""

    def __init__(self, vertices):
        verts = np.asarray(vertices, dtype=float)
        self._verts = verts
        self.shape = verts.shape[1:]

    def map(self, theta):
        scores = self._verts.reshape(len(self._verts), -1) @ np.ravel(theta)
        return self._verts[int(np.argmax(scores))].copy()

    def vertices(self):
        return self._verts.copy()


def _solve_affine(V, theta):
    """Minimize ``|V a - theta|^2`` subject to ``sum(a) = 1``."""
    k = V.shape[1]
    if k == 1:
        return np.ones(1)
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = V.T @ V
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.concatenate([V.T @ theta, [1.0]])
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:k]
    return sol / sol.sum()


def sparsemap(oracle, theta, tol=1e-9, max_iter=1000):
    """Project ``theta`` onto the convex hull of the oracle's vertices.

    Active-set method: on the current set of vertices, the weights solve an
    equality-constrained least-squares problem. If some weight turns negative
    the step is cut at the first boundary and that vertex leaves the set.
    Otherwise the oracle is queried at ``theta - mu``; the run stops when the
    Frank-Wolfe gap ``<theta - mu, v - mu>`` is at most ``tol`` and adds ``v``
    to the set otherwise.
    """
    theta = np.asarray(theta, dtype=float)
    shape = theta.shape
    flat = theta.ravel()
    active = [oracle.map(theta).ravel()]
    weights = np.array([1.0])
    gap = np.inf
    for _ in range(max_iter):
        V = np.column_stack(active)
        target = _solve_affine(V, flat)
        if np.any(target < 0):
            neg = target < 0
            ratios = weights[neg] / (weights[neg] - target[neg])
            step = ratios.min()
            weights = weights + step * (target - weights)
            weights[np.flatnonzero(neg)[np.argmin(ratios)]] = 0.0
            keep = weights > 1e-15
            active = [v for v, k in zip(active, keep) if k]
            weights = weights[keep] / weights[keep].sum()
            continue
        weights = target
        mu = V @ weights
        v = oracle.map((flat - mu).reshape(shape)).ravel()
        gap = float((flat - mu) @ (v - mu))
        if gap <= tol:
            break
        if any(np.array_equal(v, a) for a in active):
            # rounding: the best vertex is already active
            break
        active.append(v)
        weights = np.append(weights, 0.0)
    else:
        raise NoConvergence(f"SparseMAP stopped with gap {gap:.3g} after {max_iter} iterations",
                            residual=gap, iterations=max_iter)
    keep = weights > 0
    support = [(a.reshape(shape), float(w)) for a, w, k in zip(active, weights, keep) if k]
    mu = sum(w * a for a, w in support)
    return StructureVector(mu, support)
