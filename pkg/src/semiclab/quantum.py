"""Schroedinger propagation and pure-state functionals.

The Hamiltonian family is ``-hbar^2/2 Lap + lam/2 |x|^2 + mu V + eps U``;
time stepping is second-order Strang splitting on the periodic grid.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import lattice
from .errors import NormDriftError, NyquistError, SizeCapError
from .lattice import SpatialGrid
from .potentials import C11, PotentialSpec, evaluate

log = logging.getLogger(__name__)

NORM_DRIFT_TOL = 1e-6
DENSE_CAP = 256


@dataclass
class WaveFunction:
    grid: SpatialGrid
    hbar: float
    psi: np.ndarray
    t: float = 0.0

    def norm(self) -> float:
        return lattice.l2_norm(self.psi, self.grid.cell)

    def normalized(self) -> "WaveFunction":
        return replace(self, psi=self.psi / self.norm())

    def momentum_amplitudes(self) -> np.ndarray:
        return lattice.forward_transform(self.psi, self.grid, self.hbar)

    def density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2


@dataclass(frozen=True)
class HamiltonianSpec:
    lam: float = 1.0
    mu: float = 0.0
    eps: float = 0.0
    V: PotentialSpec = field(default_factory=lambda: PotentialSpec("zero"))
    U: PotentialSpec = field(default_factory=lambda: PotentialSpec("zero"))

    def __post_init__(self):
        for name in ("lam", "mu", "eps"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.V.regularity != C11:
            raise ValueError(f"V must be C11-tagged, got {self.V}")

    def unperturbed(self) -> "HamiltonianSpec":
        return replace(self, eps=0.0)

    def potential(self, grid: SpatialGrid) -> np.ndarray:
        """Multiplicative part lam/2 |x|^2 + mu V + eps U on the grid."""
        xs = grid.coords
        w = 0.5 * self.lam * sum(x**2 for x in xs)
        if self.mu:
            w = w + self.mu * evaluate(self.V, *xs)
        if self.eps:
            w = w + self.eps * evaluate(self.U, *xs)
        return np.asarray(w, dtype=float) * np.ones(grid.shape)


# --- states -----------------------------------------------------------------

def _as_vec(v, d: int) -> np.ndarray:
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.shape == (1,) and d > 1:
        v = np.repeat(v, d)
    if v.shape != (d,):
        raise ValueError(f"expected {d} components, got {v.shape}")
    return v


def _check_placement(grid: SpatialGrid, hbar: float, q: np.ndarray, p: np.ndarray, width: float):
    margin = 5.0 * width
    if np.any(np.abs(q) > grid.L - margin):
        raise lattice.DomainTooSmallError(
            f"centre {q} closer than 5 widths ({margin:.3g}) to the boundary of [-{grid.L}, {grid.L})"
        )
    if np.any(np.abs(p) > 0.8 * grid.p_max(hbar)):
        raise NyquistError(f"momentum {p} exceeds 0.8 p_max = {0.8 * grid.p_max(hbar):.3g}")


def gaussian_state(grid: SpatialGrid, hbar: float, q, p, s: float) -> WaveFunction:
    """Normalised Gaussian exp(i p.x/hbar - |x-q|^2 / 2 s^2)."""
    q, p = _as_vec(q, grid.d), _as_vec(p, grid.d)
    _check_placement(grid, hbar, q, p, s)
    phase = sum(pk * x for pk, x in zip(p, grid.coords)) / hbar
    r2 = sum((x - qk) ** 2 for qk, x in zip(q, grid.coords))
    psi = np.exp(1j * phase - r2 / (2 * s**2))
    return WaveFunction(grid, hbar, psi).normalized()


def coherent_state(grid: SpatialGrid, hbar: float, q, p) -> WaveFunction:
    """Minimal-uncertainty packet centred at (q, p), position variance hbar/2."""
    return gaussian_state(grid, hbar, q, p, math.sqrt(hbar))


def squeezed_state(grid: SpatialGrid, hbar: float, q, p, s: float) -> WaveFunction:
    return gaussian_state(grid, hbar, q, p, s)


# --- functionals ------------------------------------------------------------

def inner(psi: WaveFunction, phi: WaveFunction) -> complex:
    return complex(np.vdot(psi.psi, phi.psi) * psi.grid.cell)


def moments(psi: WaveFunction) -> dict[str, np.ndarray]:
    """Per-axis means and variances of position and momentum."""
    g = psi.grid
    rho = psi.density() * g.cell
    mom = psi.momentum_amplitudes()
    rho_p = np.abs(mom) ** 2 * g.momentum(psi.hbar).cell
    xs, ps = g.coords, g.momentum(psi.hbar).coords
    mx = np.array([np.sum(x * rho) for x in xs])
    mp = np.array([np.sum(p * rho_p) for p in ps])
    vx = np.array([np.sum((x - m) ** 2 * rho) for x, m in zip(xs, mx)])
    vp = np.array([np.sum((p - m) ** 2 * rho_p) for p, m in zip(ps, mp)])
    return {"mean_x": mx, "mean_p": mp, "var_x": vx, "var_p": vp}


def delta_spread(psi: WaveFunction) -> float:
    """Total phase-space standard deviation sqrt(sum_k Var x_k + Var p_k)."""
    m = moments(psi)
    return float(np.sqrt(np.sum(m["var_x"]) + np.sum(m["var_p"])))


def kinetic_energy(psi: WaveFunction) -> float:
    mom = psi.momentum_amplitudes()
    lat = psi.grid.momentum(psi.hbar)
    p2 = sum(p**2 for p in lat.coords)
    return float(0.5 * np.sum(p2 * np.abs(mom) ** 2) * lat.cell)


def energy(psi: WaveFunction, lam: float, mu: float = 0.0, V: PotentialSpec | None = None,
           eps: float = 0.0, U: PotentialSpec | None = None) -> float:
    """<psi, H psi> for H = P^2/2 + lam/2 |x|^2 + mu V + eps U (kinetic part spectral)."""
    g = psi.grid
    xs = g.coords
    w = 0.5 * lam * sum(x**2 for x in xs)
    if mu and V is not None:
        w = w + mu * evaluate(V, *xs)
    if eps and U is not None:
        w = w + eps * evaluate(U, *xs)
    pot = float(np.sum(w * psi.density()) * g.cell)
    return kinetic_energy(psi) + pot


def trace_distance_pure(psi: WaveFunction, phi: WaveFunction) -> float:
    """Trace norm of |psi><psi| - |phi><phi| for unit vectors."""
    ov = abs(inner(psi, phi)) ** 2
    return 2.0 * math.sqrt(max(0.0, 1.0 - ov))


def tightness_report(psi: WaveFunction, R: float) -> tuple[float, float]:
    """Position and momentum mass outside the ball of radius R."""
    g = psi.grid
    if R >= 0.9 * g.L:
        raise ValueError(f"R={R} must be below 0.9 L = {0.9 * g.L}")
    r = np.sqrt(sum(x**2 for x in g.coords))
    mx = float(np.sum(psi.density()[r > R]) * g.cell)
    lat = g.momentum(psi.hbar)
    rp = np.sqrt(sum(p**2 for p in lat.coords))
    mom = np.abs(psi.momentum_amplitudes()) ** 2
    mp = float(np.sum(mom[rp > R]) * lat.cell)
    return mx, mp


def check_nyquist(psi: WaveFunction, tol: float = lattice.BOUNDARY_TOL) -> None:
    """Momentum mass near +-p_max must be negligible (no aliasing)."""
    mom = psi.momentum_amplitudes()
    mass = float(np.sum(np.abs(mom[lattice.edge_mask(psi.grid)]) ** 2) * psi.grid.momentum(psi.hbar).cell)
    if mass > tol:
        raise NyquistError(f"momentum mass {mass:.3e} near the Nyquist edge exceeds {tol:g}")


# --- propagation -------------------------------------------------------------

def step_count(T: float, dt: float) -> tuple[int, float]:
    """Number of steps and effective step (T/dt rounded up)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = max(1, math.ceil(abs(T) / dt - 1e-9))
    return n, T / n


def propagate(psi: WaveFunction, H: HamiltonianSpec, T: float, dt: float = 1e-3,
              guard_every: int = 100) -> WaveFunction:
    """Strang split-step propagation of i hbar psi_t = H psi up to time T."""
    if T == 0:
        return replace(psi, psi=psi.psi.copy())
    g, hbar = psi.grid, psi.hbar
    n, h = step_count(T, dt)
    if abs(h - dt) > 1e-15 * max(1.0, dt):
        log.debug("effective dt %.6g (requested %.6g, %d steps)", h, dt, n)
    w = H.potential(g)
    half = np.exp(-0.5j * h * w / hbar)
    full = half * half
    kin = np.exp(-0.5j * h * g.momentum(hbar).p2_fft / hbar)
    fft, ifft = np.fft.fftn, np.fft.ifftn

    u = half * psi.psi
    for i in range(n):
        u = ifft(kin * fft(u))
        u = (half if i == n - 1 else full) * u
        # mid-loop iterates carry an extra unit-modulus phase; |u|^2 is exact
        if guard_every and (i + 1) % guard_every == 0 and i < n - 1:
            lattice.check_boundary(u, g)
    out = WaveFunction(g, hbar, u, psi.t + T)
    lattice.check_boundary(out.psi, g)
    check_nyquist(out)
    drift = abs(out.norm() - 1.0)
    if drift > NORM_DRIFT_TOL:
        raise NormDriftError(f"norm drift {drift:.3e} exceeds {NORM_DRIFT_TOL:g}")
    return out


# --- density matrices (oracle scale) ----------------------------------------

@dataclass
class DensityMatrix:
    """Matrix on grid amplitudes with the dx^d weight absorbed (trace = 1)."""

    grid: SpatialGrid
    hbar: float
    rho: np.ndarray

    @classmethod
    def pure(cls, psi: WaveFunction) -> "DensityMatrix":
        v = psi.psi.reshape(-1)
        return cls(psi.grid, psi.hbar, np.outer(v, v.conj()) * psi.grid.cell)

    @classmethod
    def mixture(cls, states, weights) -> "DensityMatrix":
        weights = np.asarray(weights, dtype=float)
        weights = weights / weights.sum()
        rho = sum(w * cls.pure(s).rho for s, w in zip(states, weights))
        return cls(states[0].grid, states[0].hbar, rho)

    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))

    def check(self, tol: float = 1e-8) -> None:
        herm = np.max(np.abs(self.rho - self.rho.conj().T))
        ev = np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))
        if herm > tol or ev.min() < -tol or abs(self.trace() - 1.0) > tol:
            raise ValueError(
                f"not a density matrix: hermiticity {herm:.2e}, min eig {ev.min():.2e}, trace {self.trace():.12f}"
            )


def trace_norm(a: np.ndarray) -> float:
    """Trace norm of a Hermitian matrix."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (a + a.conj().T)))))


def propagate_density(R: DensityMatrix, H: HamiltonianSpec, T: float) -> DensityMatrix:
    """Conjugate R by the dense propagator exp(-i T H / hbar)."""
    from .oracle import dense_propagator

    if R.grid.d != 1 or R.grid.N > DENSE_CAP:
        raise SizeCapError(f"density propagation limited to d=1, N<={DENSE_CAP}")
    if T == 0:
        return DensityMatrix(R.grid, R.hbar, R.rho.copy())
    U = dense_propagator(H, R.grid, R.hbar, T)
    return DensityMatrix(R.grid, R.hbar, U @ R.rho @ U.conj().T)
