"""Generalized entropies over the probability simplex.

Every family here is zero at the vertices of the simplex, concave and
invariant to permutations of its argument. Negated, they serve as output
regularizers for the prediction functions in :mod:`fenchel_young.simplex`.

All functions operate along the last axis, so a batch of points can be passed
as a 2-d array.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import entr

from ._validation import as_simplex, check_random_state
from .exceptions import BoundaryGradient

FAMILIES = (
    "shannon",
    "tsallis",
    "norm",
    "sqnorm",
    "renyi",
    "berger-parker",
    "pairwise-hinge",
)
HINGE_KINDS = ("hinge", "smoothed", "squared")

# Parameters this close to 1 are treated as the Shannon limit.
_SHANNON_LIMIT = 1e-6


@dataclass(frozen=True)
class EntropySpec:
    """A generalized entropy family together with its parameter.

    Use the ``shannon()``, ``tsallis(alpha)`` ... constructors or
    :func:`parse_entropy` rather than filling fields by hand. Tsallis with
    ``alpha`` within 1e-6 of 1 and Renyi with ``beta`` within 1e-6 of 1 are
    normalized to Shannon.
    """

    family: str
    alpha: Optional[float] = None
    q: Optional[float] = None
    beta: Optional[float] = None
    hinge_kind: Optional[str] = None

    def __post_init__(self):
        family = self.family.lower()
        if family == "gini":
            family, alpha = "tsallis", 2.0
            object.__setattr__(self, "alpha", alpha)
        if family not in FAMILIES:
            raise ValueError(f"unknown entropy family {self.family!r}")
        object.__setattr__(self, "family", family)

        if family == "tsallis":
            if self.alpha is None or not np.isfinite(self.alpha) or self.alpha < 1:
                raise ValueError(f"Tsallis entropy needs alpha >= 1, got {self.alpha}")
            if abs(self.alpha - 1.0) < _SHANNON_LIMIT:
                object.__setattr__(self, "family", "shannon")
                object.__setattr__(self, "alpha", None)
            else:
                object.__setattr__(self, "alpha", float(self.alpha))
        elif family in ("norm", "sqnorm"):
            if self.q is None or not np.isfinite(self.q) or self.q <= 1:
                raise ValueError(f"{family} entropy needs q > 1, got {self.q}")
            object.__setattr__(self, "q", float(self.q))
        elif family == "renyi":
            if self.beta is None or not 0 < self.beta <= 1:
                raise ValueError(f"Renyi entropy needs beta in (0, 1], got {self.beta}")
            if abs(self.beta - 1.0) < _SHANNON_LIMIT:
                object.__setattr__(self, "family", "shannon")
                object.__setattr__(self, "beta", None)
            else:
                object.__setattr__(self, "beta", float(self.beta))
        elif family == "pairwise-hinge":
            if self.hinge_kind not in HINGE_KINDS:
                raise ValueError(f"hinge_kind must be one of {HINGE_KINDS}, got {self.hinge_kind!r}")

    @classmethod
    def shannon(cls):
        return cls("shannon")

    @classmethod
    def tsallis(cls, alpha):
        return cls("tsallis", alpha=alpha)

    @classmethod
    def norm(cls, q):
        return cls("norm", q=q)

    @classmethod
    def sqnorm(cls, q):
        return cls("sqnorm", q=q)

    @classmethod
    def renyi(cls, beta):
        return cls("renyi", beta=beta)

    @classmethod
    def berger_parker(cls):
        return cls("berger-parker")

    @classmethod
    def pairwise_hinge(cls, kind):
        return cls("pairwise-hinge", hinge_kind=kind)

    @property
    def separable(self):
        return self.family in ("shannon", "tsallis")

    def __str__(self):
        if self.family == "tsallis":
            return f"tsallis:{self.alpha:g}"
        if self.family in ("norm", "sqnorm"):
            return f"{self.family}:{self.q:g}"
        if self.family == "renyi":
            return f"renyi:{self.beta:g}"
        if self.family == "pairwise-hinge":
            return f"pairwise-hinge:{self.hinge_kind}"
        return self.family


def parse_entropy(text):
    """Parse the textual form used by the CLI, e.g. ``"tsallis:1.5"``."""
    if isinstance(text, EntropySpec):
        return text
    name, _, arg = text.strip().lower().partition(":")
    if name in ("shannon", "berger-parker", "gini"):
        if arg:
            raise ValueError(f"{name} takes no parameter")
        return EntropySpec(name)
    if name not in ("pairwise-hinge", "tsallis", "norm", "sqnorm", "renyi"):
        raise ValueError(f"unknown entropy {text!r}")
    if not arg:
        raise ValueError(f"entropy {name!r} needs a parameter, e.g. {name}:1.5")
    if name == "pairwise-hinge":
        return EntropySpec.pairwise_hinge(arg)
    value = float(arg)
    if name == "tsallis":
        return EntropySpec.tsallis(value)
    if name == "norm":
        return EntropySpec.norm(value)
    if name == "sqnorm":
        return EntropySpec.sqnorm(value)
    return EntropySpec.renyi(value)


EntropyLike = Union[EntropySpec, str]


def _spec(H):
    return parse_entropy(H) if isinstance(H, str) else H


def entropy_value(H, p):
    """Evaluate ``H(p)`` along the last axis of ``p``."""
    H = _spec(H)
    p = as_simplex(p)
    fam = H.family
    if fam == "shannon":
        return entr(p).sum(axis=-1)
    if fam == "tsallis":
        a = H.alpha
        return (1.0 - np.sum(p ** a, axis=-1)) / (a * (a - 1.0))
    if fam == "norm":
        return 1.0 - np.sum(p ** H.q, axis=-1) ** (1.0 / H.q)
    if fam == "sqnorm":
        return 0.5 - 0.5 * np.sum(p ** H.q, axis=-1) ** (2.0 / H.q)
    if fam == "renyi":
        b = H.beta
        return np.log(np.sum(p ** b, axis=-1)) / (1.0 - b)
    if fam == "berger-parker":
        return 1.0 - p.max(axis=-1)
    return pairwise_hinge_entropy(H.hinge_kind, p)


def pairwise_hinge_entropy(kind, p):
    """Entropy ``min_theta sum_k p_k l(theta; e_k)`` of a hinge-type loss.

    The formulas below are exact for the loss ``l(theta; e_k) =
    sum_{j != k} phi(theta_j)`` restricted to ``sum(theta) = 0``. For the
    difference form ``sum_{j != k} phi(theta_j - theta_k)`` they are only an
    upper bound (equal at the uniform distribution).

    With ``tau = min_j (1 - p_j)`` and ``S = sum_j 1 / (1 - p_j)``:

    * ``hinge``: ``tau * d``
    * ``smoothed``: ``-tau**2 / 2 * S + tau * d``
    * ``squared``: ``d**2 / (2 * S)``

    At a vertex ``S`` is infinite and every formula is taken at its limit, 0.
    """
    if kind not in HINGE_KINDS:
        raise ValueError(f"kind must be one of {HINGE_KINDS}, got {kind!r}")
    p = as_simplex(p)
    d = p.shape[-1]
    slack = 1.0 - p
    tau = slack.min(axis=-1)
    vertex = tau <= 0.0
    with np.errstate(divide="ignore"):
        S = np.sum(1.0 / np.where(slack > 0, slack, 0.0), axis=-1)
    if kind == "hinge":
        out = tau * d
    elif kind == "smoothed":
        out = np.where(vertex, 0.0, -0.5 * tau ** 2 * np.where(vertex, 0.0, S) + tau * d)
    else:
        out = np.where(vertex, 0.0, 0.5 * d ** 2 / np.where(vertex, 1.0, S))
    return out if np.ndim(out) else float(out)


def entropy_grad(H, p):
    """Gradient of ``H`` at ``p``.

    Shannon and Renyi (beta < 1) are essentially smooth: their gradient is
    unbounded at the simplex boundary and :class:`BoundaryGradient` is raised
    there. Berger-Parker returns the subgradient ``-e_k`` at the lowest index
    attaining the maximum.
    """
    H = _spec(H)
    p = as_simplex(p)
    fam = H.family
    if fam in ("shannon", "renyi") and np.any(p <= 0.0):
        raise BoundaryGradient(f"{H} has no finite gradient on the simplex boundary")
    return _grad_unchecked(H, p)


def _grad_unchecked(H, p):
    fam = H.family
    if fam == "shannon":
        return -1.0 - np.log(p)
    if fam == "tsallis":
        a = H.alpha
        return (1.0 - a * p ** (a - 1.0)) / (a * (a - 1.0))
    if fam == "norm":
        q = H.q
        nrm = np.sum(p ** q, axis=-1, keepdims=True) ** (1.0 / q)
        return -((p / nrm) ** (q - 1.0))
    if fam == "sqnorm":
        q = H.q
        nrm = np.sum(p ** q, axis=-1, keepdims=True) ** (1.0 / q)
        return -(nrm ** (2.0 - q)) * p ** (q - 1.0)
    if fam == "renyi":
        b = H.beta
        return b * p ** (b - 1.0) / ((1.0 - b) * np.sum(p ** b, axis=-1, keepdims=True))
    if fam == "berger-parker":
        g = np.zeros_like(p)
        np.put_along_axis(g, np.argmax(p, axis=-1)[..., None], -1.0, axis=-1)
        return g
    if H.hinge_kind == "squared":
        d = p.shape[-1]
        slack = 1.0 - p
        if np.any(slack <= 0):
            raise BoundaryGradient("squared pairwise-hinge entropy is not differentiable at vertices")
        S = np.sum(1.0 / slack, axis=-1, keepdims=True)
        return -0.5 * d ** 2 / S ** 2 / slack ** 2
    raise NotImplementedError(f"no gradient available for {H}")


def margin_of(H):
    """Separation margin of the loss generated by ``H``, or None.

    Uses ``grad_j H(e_k) - grad_k H(e_k)``, which for separable entropies is
    ``h'(0) - h'(1)``. Shannon has no margin; Renyi and the pairwise-hinge
    entropies are not covered by the closed form and return None.
    """
    H = _spec(H)
    fam = H.family
    if fam == "tsallis":
        return 1.0 / (H.alpha - 1.0)
    if fam in ("norm", "sqnorm", "berger-parker"):
        # grad H(e_k) = -e_k for all three
        return 1.0
    return None


@dataclass
class AssumptionReport:
    zero_at_vertices: bool
    strictly_concave: Optional[bool]
    symmetric: bool
    first_violation: Optional[str] = None

    @property
    def passed(self):
        return (self.zero_at_vertices and self.symmetric
                and self.strictly_concave is not False)


def check_assumptions(H, d, n_samples=256, seed=0, atol=1e-12):
    """Empirically check zero entropy at vertices, strict concavity and symmetry.

    ``H`` is an :class:`EntropySpec` (or its text form) or any callable
    mapping a simplex point to a float. Vertices are checked exhaustively;
    strict concavity on ``n_samples`` random midpoints and symmetry on
    ``n_samples`` random permutations, with Dirichlet(1, ..., 1) points drawn
    from ``seed``. Strict concavity is not checked (reported as None) for
    Berger-Parker, which is concave but piecewise linear.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    rng = check_random_state(seed)
    if callable(H) and not isinstance(H, EntropySpec):
        value = H
        skip_concavity = False
    else:
        spec = _spec(H)
        value = lambda p: float(entropy_value(spec, p))
        skip_concavity = spec.family == "berger-parker"

    first = None
    zero_ok = True
    for k in range(d):
        e = np.zeros(d)
        e[k] = 1.0
        v = value(e)
        if abs(v) > atol:
            zero_ok = False
            first = first or f"H(e_{k}) = {v:.3g}, expected 0"

    P = rng.dirichlet(np.ones(d), size=n_samples)
    Q = rng.dirichlet(np.ones(d), size=n_samples)

    concave_ok = None
    if not skip_concavity:
        concave_ok = True
        for p, q in zip(P, Q):
            gap = value(0.5 * (p + q)) - 0.5 * (value(p) + value(q))
            if not gap > atol:
                concave_ok = False
                first = first or f"midpoint gap {gap:.3g} <= 0 at p={p}, q={q}"
                break

    symmetric_ok = True
    for p in P:
        perm = rng.permutation(d)
        a, b = value(p), value(p[perm])
        if abs(a - b) > atol * max(1.0, abs(a)):
            symmetric_ok = False
            first = first or f"H(Pp) = {b!r} differs from H(p) = {a!r}"
            break

    return AssumptionReport(zero_ok, concave_ok, symmetric_ok, first)
