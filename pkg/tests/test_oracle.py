import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semiclab import oracle, quantum
from semiclab.errors import SizeCapError
from semiclab.lattice import SpatialGrid
from semiclab.potentials import PotentialSpec
from semiclab.quantum import HamiltonianSpec


def test_ground_energy():
    g = SpatialGrid(1, 4.0, 128)
    assert oracle.dense_spectrum(HamiltonianSpec(1.0), g, 0.1)[0] == pytest.approx(0.05, abs=1e-6)


def test_low_spectrum_is_ladder():
    g = SpatialGrid(1, 5.0, 128)
    ev = oracle.dense_spectrum(HamiltonianSpec(1.0), g, 0.1)[:6]
    np.testing.assert_allclose(ev, 0.1 * (np.arange(6) + 0.5), atol=1e-6)


def test_group_law():
    g = SpatialGrid(1, 4.0, 64)
    H = HamiltonianSpec(1.0, 0.5, 0.1, PotentialSpec("cos"), PotentialSpec("abs_sin"))
    A = oracle.dense_propagator(H, g, 0.1, 0.3)
    B = oracle.dense_propagator(H, g, 0.1, 0.45)
    np.testing.assert_allclose(A @ B, oracle.dense_propagator(H, g, 0.1, 0.75), atol=1e-9)
    np.testing.assert_allclose(oracle.dense_propagator(H, g, 0.1, 0.0), np.eye(64), atol=1e-12)


def test_dense_cap():
    with pytest.raises(SizeCapError):
        oracle.dense_propagator(HamiltonianSpec(), SpatialGrid(1, 10.0, 512), 0.1, 1.0)


def test_direct_fourier_agrees_with_fft():
    g = SpatialGrid(1, 6.0, 128)
    psi = quantum.coherent_state(g, 0.1, 0.3, 0.4)
    p = g.momentum(0.1).p
    np.testing.assert_allclose(oracle.direct_fourier(psi, p), psi.momentum_amplitudes(), atol=1e-10)


def test_crossing_pair():
    x = np.array([[0.0], [1.0]])
    y = np.array([[1.1], [-0.1]])
    w = np.full(2, 0.5)
    # the two matchings cost (1.21 + 1.21)/2 and (0.01 + 0.01)/2
    assert oracle.exact_ot_small(x, w, y, w) == pytest.approx(math.sqrt(0.01), rel=1e-12)


def test_point_masses():
    assert oracle.exact_ot_small(np.array([[0.0, 0.0]]), np.ones(1),
                                 np.array([[3.0, 4.0]]), np.ones(1)) == pytest.approx(5.0)


def _brute(x, y):
    n = len(x)
    C = ((x[:, None, :] - y[None, :, :]) ** 2).sum(-1)
    return math.sqrt(min(C[range(n), list(p)].mean() for p in itertools.permutations(range(n))))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6))
def test_simplex_matches_permutations(seed, n):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=(n, 2)), rng.normal(size=(n, 2))
    a = np.full(n, 1.0 / n)
    C = ((x[:, None, :] - y[None, :, :]) ** 2).sum(-1)
    plan = oracle.transport_simplex(a, a, C)
    assert math.sqrt(np.sum(plan * C)) == pytest.approx(_brute(x, y), abs=1e-9)
    np.testing.assert_allclose(plan.sum(1), a, atol=1e-12)


def _quantile_cost(x, a, y, b):
    """Squared W2 in 1D through the monotone coupling of the quantile functions."""
    ix, iy = np.argsort(x), np.argsort(y)
    ca, cb = np.cumsum(a[ix]), np.cumsum(b[iy])
    levels = np.union1d(ca, cb)
    mids = 0.5 * (levels + np.concatenate([[0.0], levels[:-1]]))
    qx = x[ix][np.minimum(np.searchsorted(ca, mids), len(x) - 1)]
    qy = y[iy][np.minimum(np.searchsorted(cb, mids), len(y) - 1)]
    return float(np.sum(np.diff(np.concatenate([[0.0], levels])) * (qx - qy) ** 2))


@pytest.mark.parametrize("seed", range(5))
def test_simplex_unequal_weights(seed):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=7), rng.normal(size=5)
    a, b = rng.dirichlet(np.ones(7)), rng.dirichlet(np.ones(5))
    C = (x[:, None] - y[None, :]) ** 2
    plan = oracle.transport_simplex(a, b, C)
    np.testing.assert_allclose(plan.sum(1), a, atol=1e-12)
    np.testing.assert_allclose(plan.sum(0), b, atol=1e-12)
    assert plan.min() >= -1e-15
    assert np.sum(plan * C) == pytest.approx(_quantile_cost(x, a, y, b), abs=1e-12)


def test_ot_cap():
    x = np.zeros((13, 1))
    with pytest.raises(SizeCapError):
        oracle.exact_ot_small(x, np.full(13, 1 / 13), x, np.full(13, 1 / 13))


def test_fd_momentum_variance():
    g = SpatialGrid(1, 10.0, 1024)
    psi = quantum.coherent_state(g, 0.1, 0.0, 0.4)
    assert oracle.fd_momentum_variance(psi) == pytest.approx(quantum.moments(psi)["var_p"][0], abs=1e-6)
