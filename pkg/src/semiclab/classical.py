"""Classical Hamiltonian flow and phase-space ensembles.

The flow integrates ``1/2 (p^2 + lam_eff q^2) + mu V(q)`` with the
Stormer-Verlet (kick-drift-kick) scheme, vectorized over ensembles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .potentials import C11, PotentialSpec, gradient, evaluate

LIOUVILLE = "liouville"
THEOREM3 = "theorem3"
CONVENTIONS = (LIOUVILLE, THEOREM3)


def effective_lambda(lam: float, convention: str = LIOUVILLE) -> float:
    """Quadratic coefficient of the flow under the chosen convention."""
    if convention == LIOUVILLE:
        return lam
    if convention == THEOREM3:
        return 1.0 - lam
    raise ConfigError(f"unknown flow convention {convention!r}; expected one of {CONVENTIONS}")


@dataclass
class Ensemble:
    """Weighted point cloud in T*R^d; q and p have shape (n, d)."""

    q: np.ndarray
    p: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        self.q = np.atleast_2d(np.asarray(self.q, float))
        self.p = np.atleast_2d(np.asarray(self.p, float))
        self.w = np.asarray(self.w, float).reshape(-1)
        if self.q.shape != self.p.shape or self.q.shape[0] != self.w.size:
            raise ValueError("q, p, w sizes disagree")
        if np.any(self.w < 0) or abs(self.w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must be nonnegative and sum to 1 (sum={self.w.sum()!r})")
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.p))):
            raise ValueError("non-finite phase-space coordinates")

    @classmethod
    def point(cls, q, p) -> "Ensemble":
        q, p = np.atleast_1d(np.asarray(q, float)), np.atleast_1d(np.asarray(p, float))
        return cls(q[None, :], p[None, :], np.ones(1))

    @property
    def size(self) -> int:
        return self.w.size

    @property
    def d(self) -> int:
        return self.q.shape[1]

    def points(self) -> np.ndarray:
        """Stacked (q, p) coordinates, shape (n, 2d)."""
        return np.hstack([self.q, self.p])


def _force(q: np.ndarray, lam: float, mu: float, V: PotentialSpec) -> np.ndarray:
    f = -lam * q
    if mu and V.kind != "zero":
        g, _ = gradient(V, *q.T)
        f = f - mu * g.T
    return f


def hamiltonian(q, p, lam: float, mu: float = 0.0, V: PotentialSpec | None = None) -> np.ndarray:
    q, p = np.atleast_2d(q), np.atleast_2d(p)
    h = 0.5 * np.sum(p**2, axis=1) + 0.5 * lam * np.sum(q**2, axis=1)
    if mu and V is not None:
        h = h + mu * evaluate(V, *q.T)
    return h


def verlet(q: np.ndarray, p: np.ndarray, lam: float, mu: float, V: PotentialSpec,
           T: float, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Kick-drift-kick steps over [0, T]; negative T runs backwards."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if V.regularity != C11:
        raise ValueError(f"classical flow needs a C11 potential, got {V}")
    q, p = np.array(q, float), np.array(p, float)
    if T == 0:
        return q, p
    n = max(1, math.ceil(abs(T) / dt - 1e-9))
    h = T / n
    f = _force(q, lam, mu, V)
    for _ in range(n):
        p += 0.5 * h * f
        q += h * p
        f = _force(q, lam, mu, V)
        p += 0.5 * h * f
    return q, p


def flow(lam: float, mu: float, V: PotentialSpec, z0, T: float, dt: float = 1e-3,
         convention: str = LIOUVILLE) -> tuple[np.ndarray, np.ndarray]:
    """Image (q, p) of z0 = (q0, p0) under the time-T flow."""
    q0, p0 = z0
    q0 = np.atleast_1d(np.asarray(q0, float))[None, :]
    p0 = np.atleast_1d(np.asarray(p0, float))[None, :]
    q, p = verlet(q0, p0, effective_lambda(lam, convention), mu, V, T, dt)
    return q[0], p[0]


def pushforward(ens: Ensemble, lam: float, mu: float, V: PotentialSpec, T: float,
                dt: float = 1e-3, convention: str = LIOUVILLE) -> Ensemble:
    q, p = verlet(ens.q, ens.p, effective_lambda(lam, convention), mu, V, T, dt)
    return Ensemble(q, p, ens.w.copy())


def sample_from_field(field, n: int, seed: int) -> Ensemble:
    """Systematic sampling of lattice cells by mass, jittered uniformly inside each cell."""
    vals = np.asarray(field.values, float)
    if vals.min() < -1e-6 * max(1.0, vals.max()):
        raise ValueError(f"field has negative mass ({vals.min():.3e}); sample a Husimi field")
    mass = np.clip(vals, 0.0, None) * field.cell
    total = mass.sum()
    if abs(total - 1.0) > 1e-3:
        raise ValueError(f"field integrates to {total:.6f}, expected 1")
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(mass.ravel()) / total
    u = (rng.random() + np.arange(n)) / n
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), cdf.size - 1)
    i, k = np.unravel_index(idx, vals.shape)
    q = field.x[i] + (rng.random(n) - 0.5) * field.dx
    p = field.xi[k] + (rng.random(n) - 0.5) * field.dxi
    return Ensemble(q[:, None], p[:, None], np.full(n, 1.0 / n))
