"""Scalar root finders for monotone decreasing functions on a bracket.

Both solvers stop as soon as ``|f(x)| <= tol``. They also stop when the
bracket has shrunk to a few ulps, since no better floating point root exists
then; ``converged`` reports whether the residual test itself was met.
"""

from dataclasses import dataclass

import numpy as np

_EPS = np.finfo(float).eps


@dataclass
class RootResult:
    root: object
    residual: object
    iterations: int
    function_evals: int
    converged: bool


def _collapsed(lo, hi):
    return np.abs(hi - lo) <= 4 * _EPS * np.maximum(1.0, np.abs(lo))


def bisect(f, lo, hi, tol=1e-9, max_iter=100, callback=None):
    """Bisection on a decreasing ``f`` with ``f(lo) >= 0 >= f(hi)``.

    ``lo`` and ``hi`` may be arrays, in which case ``f`` must map an array of
    candidate roots to an array of residuals and every entry is bisected
    independently (rows that have converged are frozen). Iteration starts at
    the midpoint, as in the classical algorithm; the endpoints themselves are
    never evaluated.

    ``callback(x)`` is called after every evaluation and may return True to
    stop early.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    x = 0.5 * (lo + hi)
    fx = np.asarray(f(x), dtype=float)
    evals = 1
    it = 0
    done = (np.abs(fx) <= tol) | _collapsed(lo, hi)
    while not np.all(done):
        if callback is not None and callback(x):
            break
        if it >= max_iter:
            break
        it += 1
        neg = fx < 0
        hi = np.where(~done & neg, x, hi)
        lo = np.where(~done & ~neg, x, lo)
        x_new = 0.5 * (lo + hi)
        x = np.where(done, x, x_new)
        fx = np.asarray(f(x), dtype=float)
        evals += 1
        done = done | (np.abs(fx) <= tol) | _collapsed(lo, hi)
    if callback is not None and np.all(done):
        callback(x)
    converged = bool(np.all(done))
    return RootResult(x if x.ndim else float(x), fx if fx.ndim else float(fx),
                      it, evals, converged)


def brent(f, lo, hi, tol=1e-9, max_iter=100, callback=None):
    """Brent-Dekker root finding on a scalar decreasing ``f``.

    Combines inverse quadratic interpolation, secant steps and bisection,
    falling back to bisection whenever an interpolation step would not shrink
    the bracket fast enough. Both endpoints are evaluated first.
    """
    a, b = float(lo), float(hi)
    fa, fb = float(f(a)), float(f(b))
    evals = 2
    if abs(fa) <= tol:
        return RootResult(a, fa, 0, evals, True)
    if abs(fb) <= tol:
        return RootResult(b, fb, 0, evals, True)
    if fa * fb > 0:
        raise ValueError("root is not bracketed")

    c, fc = a, fa
    d = e = b - a
    it = 0
    while True:
        if fb * fc > 0:
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        xtol = 2 * _EPS * max(1.0, abs(b))
        m = 0.5 * (c - b)
        if abs(fb) <= tol or abs(m) <= xtol:
            return RootResult(b, fb, it, evals, True)
        if callback is not None and callback(b):
            return RootResult(b, fb, it, evals, False)
        if it >= max_iter:
            return RootResult(b, fb, it, evals, False)
        it += 1

        if abs(e) >= xtol and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                # secant
                p = 2 * m * s
                q = 1 - s
            else:
                # inverse quadratic interpolation
                q = fa / fc
                r = fb / fc
                p = s * (2 * m * q * (q - r) - (b - a) * (r - 1))
                q = (q - 1) * (r - 1) * (s - 1)
            if p > 0:
                q = -q
            else:
                p = -p
            if 2 * p < min(3 * m * q - abs(xtol * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = m
        else:
            d = e = m

        a, fa = b, fb
        b = b + d if abs(d) > xtol else b + np.copysign(xtol, m)
        fb = float(f(b))
        evals += 1
