import numpy as np
import pytest
from scipy.special import wrightomega

from fenchel_young import ProxSpec, entropy_value, moreau_decompose, prox, sparsemax, wright_omega

import oracles

KINDS = ["squared", "perceptron", "sparsemax", "cost-hinge", "shannon", "tsallis15"]


def _spec(kind, d, rng):
    return ProxSpec(kind, tuple(rng.uniform(size=d)) if kind == "cost-hinge" else None)


def _omega(spec):
    """Regularizer value on the simplex (the squared case on all of R^d)."""
    kind = spec.kind
    if kind == "squared":
        return lambda mu: 0.5 * mu @ mu
    if kind == "perceptron":
        return lambda mu: 0.0
    if kind == "sparsemax":
        return lambda mu: 0.5 * mu @ mu
    if kind == "cost-hinge":
        return lambda mu: -np.asarray(spec.cost) @ mu
    if kind == "shannon":
        return lambda mu: -entropy_value("shannon", np.clip(mu, 0, None) / np.clip(mu, 0, None).sum())
    return lambda mu: -entropy_value("tsallis:1.5", np.clip(mu, 0, None) / np.clip(mu, 0, None).sum())


def test_examples():
    np.testing.assert_allclose(prox("squared", 1.0, [2, 4]), [1, 2])
    np.testing.assert_allclose(prox("sparsemax", 0.0, [0.5, 0.2, -0.3]), [0.65, 0.35, 0])
    eta = np.array([0.2, 0.3, 0.5])
    np.testing.assert_allclose(prox("shannon", 1e-9, eta), eta, atol=1e-7)
    np.testing.assert_allclose(moreau_decompose("squared", 1.0, np.array([2.0, 4.0])), [1, 2])


def test_closed_forms(rng):
    for _ in range(20):
        eta = rng.normal(scale=2, size=5)
        tau = float(np.exp(rng.uniform(-2, 2)))
        np.testing.assert_allclose(prox("perceptron", tau, eta), sparsemax(eta))
        np.testing.assert_allclose(prox("sparsemax", tau, eta), sparsemax(eta / (1 + tau)))
        c = rng.uniform(size=5)
        np.testing.assert_allclose(prox(ProxSpec("cost-hinge", tuple(c)), tau, eta),
                                   sparsemax(eta + tau * c))


@pytest.mark.parametrize("kind", KINDS)
def test_moreau_matches_direct(kind, rng):
    for _ in range(10):
        d = int(rng.integers(2, 7))
        spec = _spec(kind, d, rng)
        tau = float(np.exp(rng.uniform(-2, 2)))
        eta = rng.normal(scale=2, size=d)
        np.testing.assert_allclose(moreau_decompose(spec, tau, eta), prox(spec, tau, eta),
                                   atol=1e-8)


@pytest.mark.parametrize("kind", ["shannon", "tsallis15"])
def test_root_finding_prox_against_slsqp(kind, rng):
    spec = ProxSpec(kind)
    for _ in range(5):
        eta = rng.normal(size=4)
        tau = float(np.exp(rng.uniform(-1, 1)))
        got = prox(spec, tau, eta)
        assert np.all(got >= 0) and got.sum() == pytest.approx(1.0, abs=1e-9)
        ref = oracles.prox_by_slsqp(_omega(spec), tau, eta)
        np.testing.assert_allclose(got, ref, atol=2e-4)


@pytest.mark.parametrize("kind", KINDS)
def test_optimality_against_perturbations(kind, rng):
    d = 4
    spec = _spec(kind, d, rng)
    omega = _omega(spec)
    tau = 0.7
    eta = rng.normal(size=d)
    mu = prox(spec, tau, eta)

    def objective(m):
        return 0.5 * np.sum((m - eta) ** 2) + tau * omega(m)

    base = objective(mu)
    for _ in range(100):
        if kind == "squared":
            other = mu + rng.normal(scale=0.1, size=d)
        else:
            other = 0.9 * mu + 0.1 * rng.dirichlet(np.ones(d))
        assert objective(other) >= base - 1e-12


@pytest.mark.parametrize("kind", KINDS)
def test_nonexpansive(kind, rng):
    for _ in range(20):
        spec = _spec(kind, 4, rng)
        a, b = rng.normal(scale=2, size=(2, 4))
        tau = float(np.exp(rng.uniform(-1, 1)))
        assert np.linalg.norm(prox(spec, tau, a) - prox(spec, tau, b)) <= \
            np.linalg.norm(a - b) + 1e-9


def test_wright_omega(rng):
    assert wright_omega(1.0) == pytest.approx(1.0)
    assert wright_omega(np.e + 1) == pytest.approx(np.e)
    # omega constant, frozen from the Newton iteration and checked by residual
    assert wright_omega(0.0) == pytest.approx(0.5671432904097838, abs=1e-15)
    z = rng.uniform(-10, 10, size=1000)
    w = wright_omega(z)
    assert np.max(np.abs(w + np.log(w) - z)) <= 1e-12
    np.testing.assert_allclose(w, wrightomega(z).real, rtol=1e-13)
    assert wright_omega(-800.0) == 0.0


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        ProxSpec("cost-hinge")
    with pytest.raises(ValueError):
        prox("shannon", -1.0, [0.0, 1.0])
    with pytest.raises(ValueError):
        wright_omega(np.inf)
