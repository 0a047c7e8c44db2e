"""The permutahedron: convex hull of all permutations of a vector ``w``.

Maximizing ``<theta, y>`` over it places the largest entry of ``w`` where
``theta`` is largest, the second largest at the second largest ``theta``,
and so on. Euclidean projection onto it reduces to a decreasing isotonic
regression after sorting ``theta``.
"""

from dataclasses import dataclass

import numpy as np

from .._validation import check_scores
from .types import StructureVector


@dataclass(frozen=True)
class PermutahedronSpec:
    """Generating vector ``w``, sorted in decreasing order."""

    w: tuple

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 1 or w.size < 1 or not np.all(np.isfinite(w)):
            raise ValueError("w must be a finite vector")
        if np.any(np.diff(w) > 0):
            raise ValueError("w must be sorted in decreasing order")
        object.__setattr__(self, "w", tuple(w))

    @property
    def array(self):
        return np.asarray(self.w)


def _as_spec(spec):
    return spec if isinstance(spec, PermutahedronSpec) else PermutahedronSpec(spec)


def _descending_order(theta):
    # stable, so equal scores keep their index order
    return np.argsort(-theta, kind="stable")


def permutahedron_map(spec, theta):
    """Vertex maximizing ``<theta, y>``; ties in ``theta`` go by index."""
    spec = _as_spec(spec)
    theta = check_scores(theta, min_dim=1)
    if theta.shape != (len(spec.w),):
        raise ValueError(f"theta must have length {len(spec.w)}")
    y = np.empty_like(theta)
    y[_descending_order(theta)] = spec.array
    return y


def isotonic_decreasing(y):
    """Least-squares fit of ``y`` under ``v_1 >= v_2 >= ...``.

    Pool adjacent violators: blocks are merged while the mean of a block is
    smaller than the mean of the one after it.
    """
    y = np.asarray(y, dtype=float)
    sums, counts = [], []
    for value in y:
        sums.append(value)
        counts.append(1)
        while len(sums) > 1 and sums[-2] * counts[-1] < sums[-1] * counts[-2]:
            s, c = sums.pop(), counts.pop()
            sums[-1] += s
            counts[-1] += c
    return np.repeat(np.array(sums) / np.array(counts), counts)


def permutahedron_project(spec, theta):
    """Euclidean projection of ``theta`` onto the permutahedron of ``w``."""
    spec = _as_spec(spec)
    theta = check_scores(theta, min_dim=1)
    if theta.shape != (len(spec.w),):
        raise ValueError(f"theta must have length {len(spec.w)}")
    order = _descending_order(theta)
    s = theta[order]
    v = isotonic_decreasing(s - spec.array)
    mu = np.empty_like(theta)
    mu[order] = s - v
    return StructureVector(mu)
