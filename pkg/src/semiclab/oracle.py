"""Brute-force reference implementations for validating the fast paths.

Everything here is dense and slow on purpose.  None of it is used inside
sweeps; the test suite and the ``selftest-oracles`` command call it.
"""
from __future__ import annotations

import itertools

import numpy as np

from .errors import ConvergenceError, SizeCapError
from .lattice import SpatialGrid
from .phasespace import PhaseSpaceField, WIGNER, HUSIMI, xi_nodes
from .quantum import DENSE_CAP, HamiltonianSpec, WaveFunction

WIGNER_CAP = 512
OT_CAP = 12


def _require_dense(grid: SpatialGrid, cap: int = DENSE_CAP):
    if grid.d != 1 or grid.N > cap:
        raise SizeCapError(f"oracle limited to d=1, N<={cap}; got d={grid.d}, N={grid.N}")


def kinetic_matrix(grid: SpatialGrid, hbar: float) -> np.ndarray:
    """Spectral -hbar^2/2 d^2/dx^2 as a dense Hermitian matrix."""
    _require_dense(grid)
    n = grid.N
    F = np.fft.fft(np.eye(n), axis=0) / np.sqrt(n)
    p2 = grid.momentum(hbar).p2_fft
    K = F.conj().T @ (0.5 * p2[:, None] * F)
    return 0.5 * (K + K.conj().T)


def dense_hamiltonian(H: HamiltonianSpec, grid: SpatialGrid, hbar: float) -> np.ndarray:
    return kinetic_matrix(grid, hbar) + np.diag(H.potential(grid)).astype(complex)


def dense_propagator(H: HamiltonianSpec, grid: SpatialGrid, hbar: float, T: float) -> np.ndarray:
    """exp(-i T H / hbar) through the Hermitian eigendecomposition."""
    _require_dense(grid)
    if T == 0:
        return np.eye(grid.N, dtype=complex)
    evals, evecs = np.linalg.eigh(dense_hamiltonian(H, grid, hbar))
    return (evecs * np.exp(-1j * T * evals / hbar)) @ evecs.conj().T


def dense_spectrum(H: HamiltonianSpec, grid: SpatialGrid, hbar: float) -> np.ndarray:
    return np.linalg.eigvalsh(dense_hamiltonian(H, grid, hbar))


def propagate_dense(psi: WaveFunction, H: HamiltonianSpec, T: float) -> WaveFunction:
    U = dense_propagator(H, psi.grid, psi.hbar, T)
    return WaveFunction(psi.grid, psi.hbar, U @ psi.psi, psi.t + T)


# --- phase space --------------------------------------------------------------

def direct_wigner(psi: WaveFunction) -> PhaseSpaceField:
    """Wigner function by explicit quadrature over the lag, zero outside the box."""
    _require_dense(psi.grid, WIGNER_CAP)
    g, hbar, n = psi.grid, psi.hbar, psi.grid.N
    xi = xi_nodes(g, hbar)
    m = np.arange(-n // 2, n // 2)
    y = 2 * g.dx / hbar * m
    dy = y[1] - y[0]
    pad = np.concatenate([np.zeros(n), psi.psi, np.zeros(n)])
    j = np.arange(n)[:, None] + n
    corr = pad[j + m[None, :]] * np.conj(pad[j - m[None, :]])  # [x, y]
    kernel = np.exp(-1j * np.outer(y, xi))  # [y, xi]
    w = (corr @ kernel) * dy / (2 * np.pi)
    return PhaseSpaceField(g.x.copy(), xi, w.real.copy(), hbar, WIGNER)


def smooth_wigner(field: PhaseSpaceField) -> PhaseSpaceField:
    """Convolve a Wigner field with the Gaussian of variance hbar/2 per axis."""
    hbar = field.hbar
    x, xi = field.x, field.xi
    kx = np.exp(-((x[:, None] - x[None, :]) ** 2) / hbar) * field.dx / np.sqrt(np.pi * hbar)
    kp = np.exp(-((xi[:, None] - xi[None, :]) ** 2) / hbar) * field.dxi / np.sqrt(np.pi * hbar)
    return PhaseSpaceField(x.copy(), xi.copy(), kx @ field.values @ kp.T, hbar, HUSIMI)


def direct_fourier(psi: WaveFunction, p: np.ndarray) -> np.ndarray:
    """(2 pi hbar)^-1/2 sum_j exp(-i p x_j / hbar) psi_j dx at arbitrary momenta."""
    g = psi.grid
    return (2 * np.pi * psi.hbar) ** -0.5 * g.dx * np.exp(-1j * np.outer(p, g.x) / psi.hbar) @ psi.psi


def fd_momentum_variance(psi: WaveFunction) -> float:
    """Var(p) through an 8th-order central difference for d/dx (no FFT)."""
    g, hbar = psi.grid, psi.hbar
    c = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
    u = np.concatenate([np.zeros(4), psi.psi, np.zeros(4)])
    du = sum(ck * u[k:k + g.N] for k, ck in enumerate(c)) / g.dx
    mean = (-1j * hbar * np.vdot(psi.psi, du) * g.dx).real
    second = hbar**2 * np.sum(np.abs(du) ** 2) * g.dx
    return float(second - mean**2)


# --- optimal transport ---------------------------------------------------------

def _cost(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x, y = np.atleast_2d(x), np.atleast_2d(y)
    return np.sum((x[:, None, :] - y[None, :, :]) ** 2, axis=-1)


def _northwest(a: np.ndarray, b: np.ndarray):
    n, m = len(a), len(b)
    flow = np.zeros((n, m))
    basis = []
    ra, rb = a.copy(), b.copy()
    i = j = 0
    while i < n and j < m:
        t = min(ra[i], rb[j])
        flow[i, j] = t
        basis.append((i, j))
        ra[i] -= t
        rb[j] -= t
        if i == n - 1 and j == m - 1:
            break
        if (ra[i] <= rb[j] and i < n - 1) or j == m - 1:
            i += 1
        else:
            j += 1
    return flow, basis


def _potentials(C, basis, n, m):
    u = np.full(n, np.nan)
    v = np.full(m, np.nan)
    u[0] = 0.0
    pending = list(basis)
    while pending:
        rest = []
        for i, j in pending:
            if not np.isnan(u[i]):
                v[j] = C[i, j] - u[i]
            elif not np.isnan(v[j]):
                u[i] = C[i, j] - v[j]
            else:
                rest.append((i, j))
        if len(rest) == len(pending):
            raise ConvergenceError("transportation basis is not a spanning tree")
        pending = rest
    return u, v


def _cycle(basis, enter):
    """Alternating row/column cycle through the basis that closes at `enter`."""
    cells = basis + [enter]

    def search(path, along_row):
        i, j = path[-1]
        for c in cells:
            if c in path[1:] or c == path[-1]:
                continue
            if along_row and c[0] != i or not along_row and c[1] != j:
                continue
            if c == enter and len(path) >= 4 and len(path) % 2 == 0:
                return path
            if c == enter:
                continue
            found = search(path + [c], not along_row)
            if found:
                return found
        return None

    return search([enter], True)


def transport_simplex(a, b, C, max_iter: int = 10_000):
    """Textbook transportation simplex (northwest start, u-v pricing)."""
    a, b, C = np.asarray(a, float), np.asarray(b, float), np.asarray(C, float)
    n, m = C.shape
    flow, basis = _northwest(a, b)
    for _ in range(max_iter):
        u, v = _potentials(C, basis, n, m)
        reduced = C - u[:, None] - v[None, :]
        i, j = np.unravel_index(np.argmin(reduced), reduced.shape)
        if reduced[i, j] >= -1e-12 * max(1.0, np.abs(C).max()):
            return flow
        cyc = _cycle(basis, (i, j))
        minus = cyc[1::2]
        theta = min(flow[c] for c in minus)
        leave = min((c for c in minus if flow[c] == theta), key=lambda c: basis.index(c))
        for k, c in enumerate(cyc):
            flow[c] += theta if k % 2 == 0 else -theta
        flow[leave] = 0.0
        basis[basis.index(leave)] = (i, j)
    raise ConvergenceError("transportation simplex did not terminate")


def exact_ot_small(x, a, y, b) -> float:
    """W2 between small discrete measures by a method independent of the fast path.

    Equal uniform weights: enumerate all matchings (n <= 8).  Otherwise the
    dense transportation simplex.
    """
    x, y = np.atleast_2d(x), np.atleast_2d(y)
    if x.shape[0] == 1 and x.shape[1] > 1 and np.ndim(a) == 1 and len(a) == x.shape[1]:
        x = x.T
    if y.shape[0] == 1 and y.shape[1] > 1 and np.ndim(b) == 1 and len(b) == y.shape[1]:
        y = y.T
    a, b = np.asarray(a, float), np.asarray(b, float)
    n, m = len(a), len(b)
    if n > OT_CAP or m > OT_CAP:
        raise SizeCapError(f"enumeration oracle limited to {OT_CAP} points")
    C = _cost(x, y)
    if n == m and n <= 8 and np.allclose(a, 1 / n, rtol=0, atol=1e-15) and np.allclose(b, a, rtol=0, atol=1e-15):
        best = min(sum(C[i, s[i]] for i in range(n)) for s in itertools.permutations(range(n)))
        return float(np.sqrt(max(best / n, 0.0)))
    flow = transport_simplex(a, b, C)
    return float(np.sqrt(max(np.sum(flow * C), 0.0)))
