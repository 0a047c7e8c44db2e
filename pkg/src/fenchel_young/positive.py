"""One-vs-all prediction and losses over the nonnegative orthant.

With a regularizer that is a sum of the same scalar function ``phi`` over
coordinates, the prediction and loss split into ``d`` independent binary
problems. Three choices of ``phi`` are provided:

============== ============================ ===============================
name           phi(m)                       prediction
============== ============================ ===============================
squared        m^2 / 2 on m >= 0            max(theta, 0)
fermi-dirac    m log m + (1-m) log(1-m)     sigmoid(theta)
sparse-sigmoid m^2 - m on [0, 1]            clip((theta + 1) / 2, 0, 1)
============== ============================ ===============================
"""

import numpy as np
from scipy.special import expit, xlogy

from ._validation import check_scores
from .exceptions import TargetOutsideDomain

PHIS = ("squared", "fermi-dirac", "sparse-sigmoid")


def _check_phi(phi):
    phi = phi.lower().replace("_", "-")
    if phi == "tsallis2":
        phi = "sparse-sigmoid"
    if phi not in PHIS:
        raise ValueError(f"phi must be one of {PHIS}, got {phi!r}")
    return phi


def ova_predict(phi, theta):
    phi = _check_phi(phi)
    theta = check_scores(theta, min_dim=1)
    if phi == "squared":
        return np.maximum(theta, 0.0)
    if phi == "fermi-dirac":
        return expit(theta)
    return np.clip(0.5 * (theta + 1.0), 0.0, 1.0)


def _check_target(phi, y, shape, tol=1e-9):
    y = np.asarray(y, dtype=float)
    if y.shape != shape:
        raise ValueError(f"target shape {y.shape} does not match scores {shape}")
    if not np.all(np.isfinite(y)) or np.any(y < -tol):
        raise TargetOutsideDomain("one-vs-all targets must be nonnegative")
    if phi != "squared" and np.any(y > 1 + tol):
        raise TargetOutsideDomain(f"{phi} targets must lie in [0, 1]")
    return np.clip(y, 0.0, None if phi == "squared" else 1.0)


def _phi_value(phi, y):
    if phi == "squared":
        return 0.5 * y * y
    if phi == "fermi-dirac":
        return xlogy(y, y) + xlogy(1 - y, 1 - y)
    return y * y - y


def _phi_conjugate(phi, theta):
    if phi == "squared":
        return 0.5 * np.maximum(theta, 0.0) ** 2
    if phi == "fermi-dirac":
        return np.logaddexp(0.0, theta)
    # conjugate of m^2 - m on [0, 1]
    return np.where(theta <= -1, 0.0,
                    np.where(theta >= 1, theta, 0.25 * (theta + 1.0) ** 2))


def ova_loss(phi, theta, y):
    """Sum over coordinates of ``phi*(theta_j) + phi(y_j) - theta_j y_j``."""
    phi = _check_phi(phi)
    theta = check_scores(theta, min_dim=1)
    y = _check_target(phi, y, theta.shape)
    if phi == "fermi-dirac":
        # stable rewrite of log(1 + e^t) - t y, valid for any y in [0, 1]
        per = (np.maximum(theta, 0.0) + np.log1p(np.exp(-np.abs(theta)))
               + _phi_value(phi, y) - theta * y)
    else:
        per = _phi_conjugate(phi, theta) + _phi_value(phi, y) - theta * y
    out = np.maximum(per, 0.0).sum(axis=-1)
    return out if np.ndim(out) else float(out)


def ova_loss_grad(phi, theta, y):
    phi = _check_phi(phi)
    theta = check_scores(theta, min_dim=1)
    y = _check_target(phi, y, theta.shape)
    return ova_predict(phi, theta) - y
