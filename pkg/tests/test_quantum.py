import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semiclab import oracle, quantum
from semiclab.errors import DomainTooSmallError, NyquistError, SizeCapError
from semiclab.lattice import SpatialGrid
from semiclab.potentials import PotentialSpec
from semiclab.quantum import HamiltonianSpec, coherent_state

V_COS = PotentialSpec("cos", {"a": 1.0, "omega": 1.0})
U_SIN = PotentialSpec("abs_sin", {"a": 0.7, "omega": 1.0})


def test_coherent_moments(grid512):
    m = quantum.moments(coherent_state(grid512, 0.1, 0.0, 0.0))
    assert abs(m["mean_x"][0]) < 1e-12 and abs(m["mean_p"][0]) < 1e-12
    assert m["var_x"][0] == pytest.approx(0.05, abs=1e-10)
    assert m["var_p"][0] == pytest.approx(0.05, abs=1e-10)


def test_coherent_is_real_at_zero_momentum(grid512):
    psi = coherent_state(grid512, 0.1, 0.0, 0.0)
    assert np.abs(psi.psi.imag).max() == 0.0


@pytest.mark.parametrize("dz, expected", [(1.0, math.exp(-5.0)), (0.0, 1.0), (0.5, math.exp(-1.25))])
def test_coherent_overlap(grid512, dz, expected):
    a = coherent_state(grid512, 0.1, 0.0, 0.0)
    b = coherent_state(grid512, 0.1, dz, 0.0)
    assert abs(quantum.inner(a, b)) ** 2 == pytest.approx(expected, rel=1e-10)


def test_momentum_overlap(grid512):
    a = coherent_state(grid512, 0.1, 0.3, -0.2)
    b = coherent_state(grid512, 0.1, 0.3, 0.4)
    assert abs(quantum.inner(a, b)) ** 2 == pytest.approx(math.exp(-0.36 / 0.2), rel=1e-10)


@pytest.mark.parametrize("q, p", [(0.0, 0.0), (1.0, -0.5), (-2.0, 1.5)])
def test_delta_spread_coherent(grid512, q, p):
    assert quantum.delta_spread(coherent_state(grid512, 0.1, q, p)) == pytest.approx(math.sqrt(0.1), rel=1e-9)


@pytest.mark.parametrize("s", [0.15, 0.3, 0.6])
def test_delta_spread_squeezed(grid512, s):
    psi = quantum.squeezed_state(grid512, 0.1, 0.5, 0.0, s)
    assert quantum.delta_spread(psi) ** 2 == pytest.approx(s**2 / 2 + 0.01 / (2 * s**2), rel=1e-8)


@settings(max_examples=20, deadline=None)
@given(s=st.floats(0.2, 1.0), hbar=st.floats(0.05, 0.3))
def test_heisenberg_floor(s, hbar):
    psi = quantum.squeezed_state(SpatialGrid(1, 10.0, 512), hbar, 0.0, 0.0, s)
    assert quantum.delta_spread(psi) ** 2 >= hbar * (1 - 1e-9)


@pytest.mark.parametrize("q, p", [(1.0, 0.0), (0.5, -1.0), (0.0, 0.7)])
def test_harmonic_energy(grid512, q, p):
    psi = coherent_state(grid512, 0.1, q, p)
    assert quantum.energy(psi, 1.0) == pytest.approx(0.5 * (p * p + q * q) + 0.05, rel=1e-10)


def test_kinetic_ground(grid512):
    assert quantum.energy(coherent_state(grid512, 0.1, 0.0, 0.0), 0.0) == pytest.approx(0.025, rel=1e-10)


def test_energy_of_zero_hamiltonian_vanishes(grid512):
    psi = coherent_state(grid512, 0.1, 0.0, 0.0)
    assert quantum.energy(psi, 0.0) - quantum.kinetic_energy(psi) == 0.0


def test_trace_distance_values(grid512):
    a = coherent_state(grid512, 0.1, 0.0, 0.0)
    b = coherent_state(grid512, 0.1, 1.0, 0.0)
    assert quantum.trace_distance_pure(a, a) == pytest.approx(0.0, abs=1e-7)
    assert quantum.trace_distance_pure(a, b) == pytest.approx(2 * math.sqrt(1 - math.exp(-5)), rel=1e-10)
    far = coherent_state(grid512, 0.1, 8.0, 0.0)
    assert quantum.trace_distance_pure(coherent_state(grid512, 0.1, -8.0, 0.0), far) == pytest.approx(2.0)


def test_trace_distance_matches_dense_trace_norm(grid128):
    a = coherent_state(grid128, 0.1, 0.2, 0.1)
    b = coherent_state(grid128, 0.1, -0.3, 0.4)
    dense = quantum.trace_norm(quantum.DensityMatrix.pure(a).rho - quantum.DensityMatrix.pure(b).rho)
    assert quantum.trace_distance_pure(a, b) == pytest.approx(dense, rel=1e-9)


def test_propagate_zero_time_is_identity(grid512):
    psi = coherent_state(grid512, 0.1, 1.0, 0.0)
    out = quantum.propagate(psi, HamiltonianSpec(), 0.0)
    np.testing.assert_array_equal(out.psi, psi.psi)


def test_harmonic_quarter_turn(grid128):
    psi = coherent_state(grid128, 0.1, 1.0, 0.0)
    H = HamiltonianSpec(1.0)
    out = quantum.propagate(psi, H, math.pi / 2)
    m = quantum.moments(out)
    assert abs(m["mean_x"][0]) < 1e-4 and abs(m["mean_p"][0] + 1.0) < 1e-4
    ref = oracle.propagate_dense(psi, H, math.pi / 2)
    assert abs(quantum.inner(ref, out)) ** 2 >= 1 - 1e-6


def test_strang_order_two(grid128):
    psi = coherent_state(grid128, 0.1, 1.0, 0.0)
    H = HamiltonianSpec(1.0, 1.0, 0.1, V_COS, U_SIN)
    ref = oracle.propagate_dense(psi, H, 1.0)
    err = [np.linalg.norm(quantum.propagate(psi, H, 1.0, dt).psi - ref.psi) * math.sqrt(grid128.dx)
           for dt in (1e-2, 5e-3)]
    assert 3.5 <= err[0] / err[1] <= 4.5


def test_norm_conserved(grid512):
    psi = coherent_state(grid512, 0.05, 1.0, 0.3)
    out = quantum.propagate(psi, HamiltonianSpec(1.0, 0.0, 0.1, U=U_SIN), 1.0)
    assert out.norm() == pytest.approx(1.0, abs=1e-12)
    assert out.t == 1.0


def test_free_packet_hits_boundary():
    g = SpatialGrid(1, 4.0, 256)
    psi = coherent_state(g, 0.1, 2.0, 2.0)
    with pytest.raises(DomainTooSmallError):
        quantum.propagate(psi, HamiltonianSpec(0.0), 2.0)


def test_placement_guards():
    g = SpatialGrid(1, 4.0, 64)
    with pytest.raises(DomainTooSmallError):
        coherent_state(g, 0.1, 3.5, 0.0)
    with pytest.raises(NyquistError):
        coherent_state(g, 0.1, 0.0, 0.9 * g.p_max(0.1))


def test_tightness_report(grid512):
    psi = coherent_state(grid512, 0.1, 0.0, 0.0)
    mx, mp = quantum.tightness_report(psi, 5 * math.sqrt(0.1))
    assert mx < 1e-5 and mp < 1e-5
    with pytest.raises(ValueError):
        quantum.tightness_report(psi, 9.5)


def test_density_propagation_matches_pure(grid128):
    psi = coherent_state(grid128, 0.1, 0.5, 0.2)
    H = HamiltonianSpec(1.0, 1.0, 0.05, V_COS, U_SIN)
    R = quantum.propagate_density(quantum.DensityMatrix.pure(psi), H, 0.7)
    # small dt keeps the splitting error of the pure route below the tolerance
    pure = quantum.DensityMatrix.pure(quantum.propagate(psi, H, 0.7, dt=2.5e-4))
    assert quantum.trace_norm(R.rho - pure.rho) < 1e-8
    R.check()


def test_mixture_trace_distance_convexity(grid128):
    H0 = HamiltonianSpec(1.0)
    He = HamiltonianSpec(1.0, 0.0, 0.1, U=U_SIN)
    states = [coherent_state(grid128, 0.1, 0.5, 0.0), coherent_state(grid128, 0.1, -0.4, 0.3)]
    w = [0.3, 0.7]
    R = quantum.DensityMatrix.mixture(states, w)
    mixed = quantum.trace_norm(quantum.propagate_density(R, H0, 1.0).rho
                               - quantum.propagate_density(R, He, 1.0).rho)
    pure = [quantum.trace_distance_pure(quantum.propagate(s, H0, 1.0), quantum.propagate(s, He, 1.0))
            for s in states]
    assert mixed <= w[0] * pure[0] + w[1] * pure[1] + 1e-9


def test_density_cap():
    g = SpatialGrid(1, 10.0, 512)
    R = quantum.DensityMatrix(g, 0.1, np.zeros((1, 1)))
    with pytest.raises(SizeCapError):
        quantum.propagate_density(R, HamiltonianSpec(), 1.0)


def test_hamiltonian_rejects_w1inf_confinement():
    with pytest.raises(ValueError):
        HamiltonianSpec(1.0, 0.5, 0.0, U_SIN)


@pytest.mark.parametrize("T, dt, n", [(1.0, 1e-3, 1000), (0.5, 0.3, 2), (1e-4, 1e-3, 1)])
def test_step_count(T, dt, n):
    assert quantum.step_count(T, dt)[0] == n
