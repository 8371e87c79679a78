"""Wigner and Husimi transforms, Toeplitz quantization, phase-space lattice.

Phase-space fields live on the product of the position nodes ``x_j`` and
``xi_k = k * hbar*pi/(2L)``, ``k in [-N/2, N/2)``; that is the lattice on
which the discrete lag-correlation Wigner transform is an exact DFT.  The xi range
is +-p_max/2, so states must keep their momentum inside half the Nyquist
band.  Only d = 1 is supported here.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lattice
from .errors import NyquistError, SizeCapError
from .lattice import SpatialGrid
from .quantum import DENSE_CAP, WaveFunction

WIGNER = "wigner"
HUSIMI = "husimi"


@dataclass
class PhaseSpaceField:
    x: np.ndarray
    xi: np.ndarray
    values: np.ndarray  # indexed [x, xi]
    hbar: float
    tag: str

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def dxi(self) -> float:
        return float(self.xi[1] - self.xi[0])

    @property
    def cell(self) -> float:
        return self.dx * self.dxi

    def mass(self) -> float:
        return float(np.sum(self.values) * self.cell)

    def x_marginal(self) -> np.ndarray:
        return self.values.sum(axis=1) * self.dxi

    def xi_marginal(self) -> np.ndarray:
        return self.values.sum(axis=0) * self.dx

    def same_lattice(self, other: "PhaseSpaceField") -> bool:
        return (
            self.values.shape == other.values.shape
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.xi, other.xi)
        )


def xi_nodes(grid: SpatialGrid, hbar: float) -> np.ndarray:
    return hbar * np.pi / (2 * grid.L) * np.arange(-grid.N // 2, grid.N // 2)


def _require_1d(psi: WaveFunction):
    if psi.grid.d != 1:
        raise NotImplementedError("phase-space transforms are implemented for d = 1")


def check_half_band(psi: WaveFunction, tol: float = lattice.BOUNDARY_TOL) -> None:
    """The lag-correlation transform aliases momenta beyond p_max/2."""
    lat = psi.grid.momentum(psi.hbar)
    mom = np.abs(psi.momentum_amplitudes()) ** 2
    outside = np.abs(lat.p) >= 0.5 * psi.grid.p_max(psi.hbar) - 4 * lat.dp
    mass = float(np.sum(mom[outside]) * lat.cell)
    if mass > tol:
        raise NyquistError(f"momentum mass {mass:.3e} beyond p_max/2; refine the grid")


def wigner(psi: WaveFunction) -> PhaseSpaceField:
    """W(x, xi) = (2 pi)^-1 int exp(-i xi y) psi(x + hbar y/2) conj psi(x - hbar y/2) dy."""
    _require_1d(psi)
    g, hbar = psi.grid, psi.hbar
    lattice.check_boundary(psi.psi, g)
    check_half_band(psi)
    n = g.N
    j = np.arange(n)[:, None]
    m = np.arange(-n // 2, n // 2)[None, :]
    # zero-padded lags: a periodic wrap would alias a sign-alternating ghost at x +- L
    pad = np.concatenate([np.zeros(n, complex), psi.psi, np.zeros(n, complex)])
    corr = pad[n + j + m] * np.conj(pad[n + j - m])
    dy = 2 * g.dx / hbar
    spec = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(corr, axes=1), axis=1), axes=1)
    w = spec * dy / (2 * np.pi)
    imag = float(np.max(np.abs(w.imag)))
    if imag > 1e-10 * max(1.0, float(np.max(np.abs(w.real)))):
        raise ArithmeticError(f"Wigner transform not real: residue {imag:.2e}")
    return PhaseSpaceField(g.x.copy(), xi_nodes(g, hbar), w.real.copy(), hbar, WIGNER)


def coherent_overlaps(psi: WaveFunction) -> np.ndarray:
    """<psi_z, psi> for z = (x_i, xi_k) on the phase-space lattice, indexed [i, k]."""
    _require_1d(psi)
    g, hbar, n = psi.grid, psi.hbar, psi.grid.N
    x = g.x
    win = np.exp(-((x[:, None] - x[None, :]) ** 2) / (2 * hbar)) * psi.psi[:, None]  # [j, i]
    # sum_j exp(-i xi_k x_j / hbar) win[j, i]; xi_k x_j / hbar = -k pi/2 + pi k j / N
    spec = np.fft.fft(win, n=2 * n, axis=0)
    k = np.arange(-n // 2, n // 2)
    rows = spec[k % (2 * n), :] * np.exp(0.5j * np.pi * k)[:, None]
    return (np.pi * hbar) ** -0.25 * g.dx * rows.T


def husimi(psi: WaveFunction) -> PhaseSpaceField:
    """H(z) = |<psi_z, psi>|^2 / (2 pi hbar) on the phase-space lattice."""
    ov = coherent_overlaps(psi)
    vals = np.abs(ov) ** 2 / (2 * np.pi * psi.hbar)
    return PhaseSpaceField(psi.grid.x.copy(), xi_nodes(psi.grid, psi.hbar), vals, psi.hbar, HUSIMI)


def coherent_wigner(x: np.ndarray, xi: np.ndarray, hbar: float, q: float, p: float) -> np.ndarray:
    """Closed-form Wigner function of the coherent state at (q, p)."""
    return np.exp(-((x[:, None] - q) ** 2 + (xi[None, :] - p) ** 2) / hbar) / (np.pi * hbar)


def coherent_husimi(x: np.ndarray, xi: np.ndarray, hbar: float, q: float, p: float) -> np.ndarray:
    return np.exp(-((x[:, None] - q) ** 2 + (xi[None, :] - p) ** 2) / (2 * hbar)) / (2 * np.pi * hbar)


# --- Toeplitz (anti-Wick) quantization -------------------------------------

def toeplitz_quantize(f: np.ndarray, grid: SpatialGrid, hbar: float, chunk: int = 16) -> np.ndarray:
    """Matrix of F = sum_z f(z) |psi_z><psi_z| dq dxi acting on grid amplitudes.

    ``f`` is sampled on the phase-space lattice, indexed [q, xi].  With this
    normalisation trace F = sum f dq dxi.
    """
    if grid.d != 1 or grid.N > DENSE_CAP:
        raise SizeCapError(f"Toeplitz quantization limited to d=1, N<={DENSE_CAP}")
    n = grid.N
    f = np.asarray(f, dtype=float)
    if f.shape != (n, n):
        raise ValueError(f"symbol shape {f.shape} != ({n}, {n})")
    x = grid.x
    dxi = hbar * np.pi / (2 * grid.L)
    # tau_i(m) = sum_k f[i, k] exp(i pi k m / N), m = a - b
    padded = np.zeros((n, 2 * n))
    k = np.arange(-n // 2, n // 2)
    padded[:, k % (2 * n)] = f
    tau = np.fft.ifft(padded, axis=1) * (2 * n)
    lag = (np.arange(n)[:, None] - np.arange(n)[None, :]) % (2 * n)
    gauss = np.exp(-((x[None, :] - x[:, None]) ** 2) / (2 * hbar))  # [i, a]
    rows = np.flatnonzero(np.any(f != 0, axis=1))
    out = np.zeros((n, n), dtype=complex)
    for start in range(0, len(rows), chunk):
        sel = rows[start:start + chunk]
        g = gauss[sel]
        out += np.einsum("ia,ib,iab->ab", g, g, tau[sel][:, lag], optimize=True)
    return out * (np.pi * hbar) ** -0.5 * grid.dx * grid.dx * dxi


def position_operator(grid: SpatialGrid) -> np.ndarray:
    return np.diag(grid.x).astype(complex)


def momentum_operator(grid: SpatialGrid, hbar: float) -> np.ndarray:
    """Spectral -i hbar d/dx as a dense matrix."""
    n = grid.N
    F = np.fft.fft(np.eye(n), axis=0) / np.sqrt(n)
    p = grid.momentum(hbar).p_fft
    return F.conj().T @ (p[:, None] * F)


def expectation(op: np.ndarray, psi: WaveFunction) -> complex:
    v = psi.psi
    return complex(np.vdot(v, op @ v) * psi.grid.dx)
