"""Structured losses built on a MAP oracle."""

import numpy as np

from ..exceptions import UnequalNorms
from .sparsemap import sparsemap


def sparsemap_loss(oracle, theta, y, tol=1e-9):
    """``|y - theta|^2 / 2 - |mu - theta|^2 / 2`` with ``mu = sparsemap(theta)``.

    Returns the loss, clipped at zero, and its gradient ``mu - y``.
    """
    theta = np.asarray(theta, dtype=float)
    y = np.asarray(y, dtype=float)
    mu = sparsemap(oracle, theta, tol=tol).mu
    loss = 0.5 * np.sum((y - theta) ** 2) - 0.5 * np.sum((mu - theta) ** 2)
    return max(float(loss), 0.0), mu - y


def structured_perceptron_loss(oracle, theta, y):
    theta = np.asarray(theta, dtype=float)
    y = np.asarray(y, dtype=float)
    v = oracle.map(theta)
    return max(float(np.sum(theta * (v - y))), 0.0), v - y


def structured_hinge_loss(oracle, theta, y, cost_weight=1.0):
    """Margin-rescaled hinge ``max_y' <theta, y'> + c(y, y') - <theta, y>``.

    For 0/1 targets the cost is the Hamming count ``<1 - y, y'>``. Otherwise
    it is ``|y|^2 - <y, y'>``, which equals ``|y - y'|^2 / 2`` when all
    vertices share a norm (permutahedra). Both are linear in ``y'``, so the
    cost-augmented decoding is one MAP call.
    """
    theta = np.asarray(theta, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.all((y == 0) | (y == 1)):
        augmented, const = theta + cost_weight * (1.0 - y), 0.0
    else:
        augmented, const = theta - cost_weight * y, cost_weight * float(np.sum(y * y))
    v = oracle.map(augmented)
    loss = float(np.sum(augmented * v) + const - np.sum(theta * y))
    return max(loss, 0.0), v - y


def structured_margin_check(oracle, theta, y, m, rtol=1e-9):
    """Check ``<theta, y> >= max_y' <theta, y'> + m / 2 * |y - y'|^2`` by enumeration.

    Requires an oracle that can list its vertices, all of the same norm.
    """
    theta = np.asarray(theta, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    verts = oracle.vertices().reshape(-1, theta.size)
    norms = np.linalg.norm(verts, axis=1)
    if np.ptp(norms) > rtol * max(1.0, norms.max()):
        raise UnequalNorms("vertices do not lie on a common sphere")
    rhs = verts @ theta + 0.5 * m * np.sum((verts - y) ** 2, axis=1)
    return bool(theta @ y >= rhs.max() - 1e-12 * max(1.0, abs(theta @ y)))
