"""Synthetic label-proportion data from a mixture of multinomials.

Each class owns a word distribution over a vocabulary of ``p`` words. A
document draws a number of labels ``K`` (Poisson), draws ``K`` labels from a
class prior, and takes the empirical label frequencies as its target. Its
words are then drawn from the mixture of the chosen classes' word
distributions, weighted by those frequencies, with a Poisson document
length. Bag-of-words counts are standardized with training statistics.

The exact constants are library choices; see ``SynthConfig``.
"""

from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from ._validation import check_random_state
from .training import Dataset


@dataclass(frozen=True)
class SynthConfig:
    """Generator settings.

    ``label_count_mean`` defaults to ``d / 10`` (at least 1). It is the rate
    of a zero-truncated Poisson giving the number of label draws per
    document, so every document has at least one label.
    ``word_concentration`` is the Dirichlet parameter of the class word
    distributions; small values give each class its own sharp vocabulary.
    """

    seed: int = 0
    n_train: int = 1200
    n_dev: int = 200
    n_test: int = 1000
    d: int = 10
    p: int = 500
    doc_len_mean: float = 200.0
    label_count_mean: Optional[float] = None
    word_concentration: float = 0.05

    def __post_init__(self):
        for name in ("n_train", "n_dev", "n_test"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.n_train < 1 or self.d < 2 or self.p < 1:
            raise ValueError("need n_train >= 1, d >= 2 and p >= 1")
        if self.doc_len_mean <= 0 or self.word_concentration <= 0:
            raise ValueError("rates must be positive")
        if self.label_count_mean is not None and self.label_count_mean <= 0:
            raise ValueError("label_count_mean must be positive")

    @property
    def labels_per_doc(self):
        if self.label_count_mean is None:
            return max(1.0, self.d / 10)
        return self.label_count_mean

    def to_dict(self):
        out = asdict(self)
        out["label_count_mean"] = self.labels_per_doc
        return out


@dataclass
class SynthData:
    train: Dataset
    dev: Dataset
    test: Dataset
    config: SynthConfig


def _label_counts(rng, rate, n):
    # zero-truncated Poisson: redraw documents that got no label
    counts = rng.poisson(rate, size=n)
    while np.any(counts == 0):
        zero = counts == 0
        counts[zero] = rng.poisson(rate, size=zero.sum())
    return counts


def synth_generate(cfg=None, **kwargs):
    """Draw train, dev and test splits; identical for identical configs."""
    cfg = cfg or SynthConfig(**kwargs)
    rng = check_random_state(cfg.seed)
    prior = rng.dirichlet(np.ones(cfg.d))
    words = rng.dirichlet(np.full(cfg.p, cfg.word_concentration), size=cfg.d)

    n = cfg.n_train + cfg.n_dev + cfg.n_test
    counts = _label_counts(rng, cfg.labels_per_doc, n)
    Y = np.array([rng.multinomial(k, prior) for k in counts], dtype=float)
    Y /= Y.sum(axis=1, keepdims=True)
    lengths = np.maximum(1, rng.poisson(cfg.doc_len_mean, size=n))
    X = np.array([rng.multinomial(length, y @ words) for length, y in zip(lengths, Y)],
                 dtype=float)

    tr = slice(0, cfg.n_train)
    mean = X[tr].mean(axis=0)
    scale = X[tr].std(axis=0)
    scale[scale == 0] = 1.0
    X = (X - mean) / scale

    a, b = cfg.n_train, cfg.n_train + cfg.n_dev
    return SynthData(Dataset(X[:a], Y[:a]), Dataset(X[a:b], Y[a:b]),
                     Dataset(X[b:], Y[b:]), cfg)


def reference_instance():
    """The small fixed instance used to compare the training algorithms.

    Two labels per document on average, so targets are proportions rather
    than one-hot vectors.
    """
    cfg = SynthConfig(seed=0, n_train=100, n_dev=0, n_test=0, d=5, p=20,
                      label_count_mean=2.0)
    return synth_generate(cfg).train
