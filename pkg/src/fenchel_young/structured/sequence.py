"""Linear-chain sequences encoded as ``n x m x m`` binary tensors.

Entry ``[t, i, j]`` of a potential tensor scores the transition from state
``j`` at step ``t - 1`` to state ``i`` at step ``t``. The first step has no
predecessor: its slice must be constant along ``j``, and structures only use
column 0 of it. A path ``(s_0, ..., s_{n-1})`` is encoded by ones at
``[0, s_0, 0]`` and ``[t, s_t, s_{t-1}]`` for ``t >= 1``, so that
``<theta, y>`` is the path score.

The public functions validate the first-slice convention. The underscored
kernels only ever read column 0 of the first slice, which lets callers pass
shifted tensors such as ``theta - mu`` or cost-augmented potentials.
"""

import itertools

import numpy as np
from scipy.special import logsumexp

from ..exceptions import InvalidStructure
from .types import StructureVector


def check_potentials(theta, tol=1e-12):
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 3 or theta.shape[1] != theta.shape[2]:
        raise ValueError(f"potentials must have shape (n, m, m), got {theta.shape}")
    n, m, _ = theta.shape
    if n < 1 or m < 2:
        raise ValueError("need at least one step and two states")
    if not np.all(np.isfinite(theta)):
        raise ValueError("potentials contain NaN or infinite entries")
    first = theta[0]
    if np.any(np.abs(first - first[:, :1]) > tol * np.maximum(1.0, np.abs(first))):
        raise ValueError("the first slice of the potentials must be constant along its last axis")
    return theta


def path_to_tensor(path, m):
    path = [int(s) for s in path]
    n = len(path)
    if n < 1 or any(not 0 <= s < m for s in path):
        raise InvalidStructure(f"path {path} is not a sequence of states in [0, {m})")
    y = np.zeros((n, m, m))
    y[0, path[0], 0] = 1.0
    for t in range(1, n):
        y[t, path[t], path[t - 1]] = 1.0
    return y


def tensor_to_path(y, tol=1e-9):
    """Decode a path indicator tensor, raising :class:`InvalidStructure`."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 3 or y.shape[1] != y.shape[2]:
        raise InvalidStructure(f"structure must have shape (n, m, m), got {y.shape}")
    if not np.all((np.abs(y) <= tol) | (np.abs(y - 1) <= tol)):
        raise InvalidStructure("structure entries must be 0 or 1")
    ones = np.abs(y - 1) <= tol
    n, m, _ = y.shape
    first = np.argwhere(ones[0])
    if len(first) != 1 or first[0, 1] != 0:
        raise InvalidStructure("first step must select exactly one state in column 0")
    path = [int(first[0, 0])]
    for t in range(1, n):
        idx = np.argwhere(ones[t])
        if len(idx) != 1 or idx[0, 1] != path[-1]:
            raise InvalidStructure(f"step {t} does not continue the path")
        path.append(int(idx[0, 0]))
    return path


def enumerate_paths(n, m):
    """All paths in lexicographic order."""
    return [list(p) for p in itertools.product(range(m), repeat=n)]


def _viterbi(theta):
    n, m, _ = theta.shape
    # suffix[t, s]: best score of steps t+1.. given state s at step t
    suffix = np.zeros((n, m))
    for t in range(n - 2, -1, -1):
        suffix[t] = np.max(theta[t + 1] + suffix[t + 1][:, None], axis=0)
    path = [int(np.argmax(theta[0, :, 0] + suffix[0]))]
    for t in range(1, n):
        path.append(int(np.argmax(theta[t, :, path[-1]] + suffix[t])))
    score = theta[0, path[0], 0] + sum(theta[t, path[t], path[t - 1]] for t in range(1, n))
    return path, float(score)


def _forward_backward(theta):
    n, m, _ = theta.shape
    alpha = np.zeros((n, m))
    alpha[0] = theta[0, :, 0]
    for t in range(1, n):
        alpha[t] = logsumexp(theta[t] + alpha[t - 1][None, :], axis=1)
    beta = np.zeros((n, m))
    for t in range(n - 2, -1, -1):
        beta[t] = logsumexp(theta[t + 1] + beta[t + 1][:, None], axis=0)
    log_z = float(logsumexp(alpha[-1]))
    marg = np.zeros_like(theta)
    marg[0, :, 0] = np.exp(alpha[0] + beta[0] - log_z)
    for t in range(1, n):
        marg[t] = np.exp(alpha[t - 1][None, :] + theta[t] + beta[t][:, None] - log_z)
    return marg, log_z


def viterbi_path(theta):
    """Best path and its score; ties go to the lexicographically smallest path."""
    return _viterbi(check_potentials(theta))


def viterbi_map(theta):
    """MAP structure as a :class:`StructureVector` with a singleton support."""
    theta = check_potentials(theta)
    path, _ = _viterbi(theta)
    y = path_to_tensor(path, theta.shape[1])
    return StructureVector(y, [(y, 1.0)])


def forward_backward(theta):
    """Edge marginals under the Gibbs distribution and its log-partition."""
    return _forward_backward(check_potentials(theta))


def crf_loss(theta, y):
    """``log Z(theta) - <theta, y>`` and its gradient ``marginals - y``.

    ``y`` is a path indicator tensor or a sequence of states.
    """
    theta = check_potentials(theta)
    n, m, _ = theta.shape
    y = np.asarray(y)
    if y.ndim == 1:
        y = path_to_tensor(y, m)
    else:
        tensor_to_path(y)
        y = y.astype(float)
    if y.shape != theta.shape:
        raise InvalidStructure(f"structure shape {y.shape} does not match potentials {theta.shape}")
    marg, log_z = _forward_backward(theta)
    loss = max(log_z - float(np.sum(theta * y)), 0.0)
    return loss, marg - y
