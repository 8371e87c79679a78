"""Uniform position/momentum grids and the unitary discrete Fourier pair.

Momentum-space arrays are stored in ascending order of the lattice index
``k in [-N/2, N/2)``, and normalised so that the discrete transform
approximates ``psi_hat(p) = (2 pi hbar)^{-d/2} int exp(-i p.x/hbar) psi(x) dx``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainTooSmallError

BOUNDARY_CELLS = 4
BOUNDARY_TOL = 1e-8


@dataclass(frozen=True)
class SpatialGrid:
    d: int
    L: float
    N: int

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.d}")
        if not self.L > 0:
            raise ValueError(f"half-width must be positive, got {self.L}")
        if self.N % 2:
            raise ValueError(f"N must be even, got {self.N}")
        if self.N < 8 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two >= 8, got {self.N}")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def cell(self) -> float:
        """Quadrature weight dx^d."""
        return self.dx**self.d

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @cached_property
    def x(self) -> np.ndarray:
        """1D node coordinates, -L + j dx."""
        return -self.L + self.dx * np.arange(self.N)

    @cached_property
    def coords(self) -> tuple[np.ndarray, ...]:
        """Per-axis coordinate arrays broadcast to the full grid shape."""
        if self.d == 1:
            return (self.x,)
        return tuple(np.meshgrid(self.x, self.x, indexing="ij"))

    def momentum(self, hbar: float) -> "MomentumLattice":
        return MomentumLattice(self, hbar)

    def p_max(self, hbar: float) -> float:
        return hbar * np.pi / self.dx


@dataclass(frozen=True)
class MomentumLattice:
    grid: SpatialGrid
    hbar: float

    @property
    def dp(self) -> float:
        return self.hbar * np.pi / self.grid.L

    @property
    def cell(self) -> float:
        return self.dp**self.grid.d

    @cached_property
    def k(self) -> np.ndarray:
        n = self.grid.N
        return np.arange(-n // 2, n // 2)

    @cached_property
    def p(self) -> np.ndarray:
        """Ascending 1D momentum nodes hbar*(pi/L)*k."""
        return self.dp * self.k

    @cached_property
    def coords(self) -> tuple[np.ndarray, ...]:
        if self.grid.d == 1:
            return (self.p,)
        return tuple(np.meshgrid(self.p, self.p, indexing="ij"))

    @cached_property
    def p_fft(self) -> np.ndarray:
        """Momentum nodes in numpy FFT order (for in-place kinetic factors)."""
        return np.fft.ifftshift(self.p)

    @cached_property
    def p2_fft(self) -> np.ndarray:
        """|p|^2 on the full grid in FFT order."""
        if self.grid.d == 1:
            return self.p_fft**2
        px, py = np.meshgrid(self.p_fft, self.p_fft, indexing="ij")
        return px**2 + py**2


def _sign(grid: SpatialGrid) -> np.ndarray:
    # exp(i pi k) from the offset x_0 = -L
    s = np.where(np.arange(-grid.N // 2, grid.N // 2) % 2, -1.0, 1.0)
    if grid.d == 1:
        return s
    return np.multiply.outer(s, s)


def _check(field: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    field = np.asarray(field)
    if field.shape != grid.shape:
        raise ValueError(f"field shape {field.shape} does not match grid {grid.shape}")
    return field


def forward_transform(field: np.ndarray, grid: SpatialGrid, hbar: float) -> np.ndarray:
    field = _check(field, grid)
    scale = (2 * np.pi * hbar) ** (-grid.d / 2) * grid.cell
    return scale * _sign(grid) * np.fft.fftshift(np.fft.fftn(field))


def inverse_transform(field: np.ndarray, grid: SpatialGrid, hbar: float) -> np.ndarray:
    field = _check(field, grid)
    scale = (2 * np.pi * hbar) ** (-grid.d / 2) * grid.cell
    return np.fft.ifftn(np.fft.ifftshift(_sign(grid) * field)) / scale


def l2_norm(field: np.ndarray, cell: float) -> float:
    return float(np.sqrt(np.sum(np.abs(field) ** 2) * cell))


def edge_mask(grid: SpatialGrid, cells: int = BOUNDARY_CELLS) -> np.ndarray:
    """True on nodes within `cells` spacings of the box boundary (any axis)."""
    j = np.arange(grid.N)
    edge = (j < cells) | (j >= grid.N - cells)
    if grid.d == 1:
        return edge
    return edge[:, None] | edge[None, :]


def boundary_mass(field: np.ndarray, grid: SpatialGrid) -> float:
    return float(np.sum(np.abs(field[edge_mask(grid)]) ** 2) * grid.cell)


def check_boundary(field: np.ndarray, grid: SpatialGrid, tol: float = BOUNDARY_TOL) -> None:
    m = boundary_mass(field, grid)
    if m > tol:
        raise DomainTooSmallError(
            f"mass {m:.3e} within {BOUNDARY_CELLS} cells of the boundary exceeds {tol:g}; "
            "enlarge L"
        )
