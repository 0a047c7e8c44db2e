"""Input validation helpers shared by the public functions."""

import numpy as np

from .exceptions import TargetOutsideDomain

# Feasibility tolerance for simplex points (nonnegativity and unit sum).
FEAS_TOL = 1e-9


def check_scores(theta, name="theta", min_dim=2):
    """Return ``theta`` as a float array after checking shape and finiteness.

    Scores are vectors along the last axis; leading axes are treated as a
    batch.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.ndim == 0:
        raise ValueError(f"{name} must be at least 1-dimensional")
    if theta.shape[-1] < min_dim:
        raise ValueError(f"{name} must have at least {min_dim} entries, got {theta.shape[-1]}")
    if not np.all(np.isfinite(theta)):
        raise ValueError(f"{name} contains NaN or infinite entries")
    return theta


def as_simplex(p, name="p", tol=FEAS_TOL, error=ValueError):
    """Validate points of the probability simplex and clamp rounding noise.

    Entries may be at most ``tol`` below zero and the sum may deviate from one
    by at most ``tol``. The returned array is clipped to [0, 1] and
    renormalized along the last axis.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim == 0 or p.shape[-1] < 1:
        raise error(f"{name} must be a non-empty vector")
    if not np.all(np.isfinite(p)):
        raise error(f"{name} contains NaN or infinite entries")
    if np.any(p < -tol):
        raise error(f"{name} has negative entries (min {p.min():.3g})")
    total = p.sum(axis=-1)
    if np.any(np.abs(total - 1.0) > tol):
        raise error(f"{name} does not sum to one (sum {np.ravel(total)[0]:.12g})")
    p = np.clip(p, 0.0, 1.0)
    return p / p.sum(axis=-1, keepdims=True)


def as_target(y, name="y"):
    return as_simplex(y, name=name, error=TargetOutsideDomain)


def check_positive(value, name):
    value = float(value)
    if not value > 0 or not np.isfinite(value):
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def check_random_state(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
