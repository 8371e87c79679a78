"""Weak distances between quantum states and optimal-transport distances.

Test-function dictionaries give certified lower bounds on two weak
distances:

* ``weak_delta`` pairs Wigner functions with test functions whose
  derivatives up to total order 3 are bounded by 1 in sup norm;
* ``weak_d_lower`` pairs states with Toeplitz observables
  ``F = sum_z f(z)|psi_z><psi_z| dz`` whose symbols have derivatives
  ``d_q^a d_p^b f`` (a, b <= 3) bounded by 1 in L^1.  The commutator
  calculus of Toeplitz operators turns those L^1 bounds into the trace-norm
  constraints on iterated commutators with x and -i hbar d/dx.

Entries are separable, ``f(q, p) = a(q) b(p)``, so all derivative norms
factor into 1D norms.  Norms are computed on dense 1D grids from exact
derivative formulas and inflated by a small safety factor, so entries are
never over-normalized.

Phase-space routines assume d = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import linear_sum_assignment, linprog

from .errors import ConvergenceError, SizeCapError
from .phasespace import PhaseSpaceField, husimi
from .quantum import WaveFunction, delta_spread

ORDER = 3  # 2*floor(d/4) + 3 for d = 1
W2_CAP = 400
SINKHORN_CAP = 20_000
NEWTON_CAP = 2_000  # dense semi-dual Hessian
STAGE_ITERS = 200  # Sinkhorn sweeps per annealing stage
WARM_TOL = 1e-2  # Sinkhorn smoothing before each Newton stage
CLOSED_SAFETY = 1.01
SAMPLED_SAFETY = 1.1
_GH_NODES, _GH_WEIGHTS = np.polynomial.hermite.hermgauss(80)


# --- 1D profiles -----------------------------------------------------------------

def _grid_norms(fn, lo: float, hi: float, size: int) -> tuple[np.ndarray, np.ndarray]:
    u = np.linspace(lo, hi, size)
    h = u[1] - u[0]
    sup, l1 = [], []
    for n in range(ORDER + 1):
        v = np.abs(fn(u, n))
        sup.append(v.max())
        l1.append(h * (v.sum() - 0.5 * (v[0] + v[-1])))
    return np.array(sup), np.array(l1)


class Profile:
    """1D factor of a separable test function."""

    safety = CLOSED_SAFETY

    def __call__(self, u, n: int = 0) -> np.ndarray:
        raise NotImplementedError

    @property
    def norms(self) -> tuple[np.ndarray, np.ndarray]:
        """(sup norms, L^1 norms) of derivatives 0..ORDER, inflated by the safety factor."""
        raise NotImplementedError


@dataclass(eq=False)
class GaussProfile(Profile):
    """Re[exp(i phase) P(y) exp(i kappa y - y^2/2)] with y = (u - c)/s."""

    c: float
    s: float
    poly: tuple = (1.0,)
    kappa: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if self.s <= 0:
            raise ValueError("scale must be positive")
        self.poly = tuple(float(v) for v in self.poly)

    @property
    def shape_key(self) -> tuple:
        return self.poly, float(self.kappa), float(self.phase)

    @cached_property
    def _derivative_polys(self):
        return _derivative_polys(*self.shape_key)

    def __call__(self, u, n: int = 0):
        y = (np.asarray(u, float) - self.c) / self.s
        q = self._derivative_polys[n]
        z = npoly.polyval(y, q) * np.exp(1j * (self.kappa * y + self.phase) - 0.5 * y**2)
        return z.real / self.s**n

    @property
    def norms(self):
        sup, l1 = _unit_norms(self.shape_key, 0.0)
        k = np.arange(ORDER + 1)
        return sup / self.s**k, l1 * self.s / self.s**k


@dataclass(eq=False)
class ConstProfile(Profile):
    value: float = 1.0

    def __call__(self, u, n: int = 0):
        u = np.asarray(u, float)
        return np.full(u.shape, self.value if n == 0 else 0.0)

    @property
    def norms(self):
        sup = np.zeros(ORDER + 1)
        sup[0] = abs(self.value)
        l1 = np.full(ORDER + 1, np.inf)
        l1[1:] = 0.0
        return sup, l1


@dataclass(eq=False)
class SmoothedProfile(Profile):
    """Convolution of a Gaussian-family profile with the centred Gaussian of variance `var`."""

    base: GaussProfile
    var: float

    def __call__(self, u, n: int = 0):
        return _smoothed(self.base, self.var, np.asarray(u, float), n)

    @property
    def norms(self):
        s = self.base.s
        sup, l1 = _unit_norms(self.base.shape_key, self.var / s**2)
        k = np.arange(ORDER + 1)
        return sup / s**k, l1 * s / s**k


def _smoothed(base: GaussProfile, var: float, u: np.ndarray, n: int) -> np.ndarray:
    shift = math.sqrt(2 * var) * _GH_NODES
    return base(u[..., None] - shift, n) @ _GH_WEIGHTS / math.sqrt(math.pi)


@lru_cache(maxsize=None)
def _derivative_polys(poly: tuple, kappa: float, phase: float):
    out = [np.asarray(poly, complex)]
    lin = np.array([1j * kappa, -1.0])
    for _ in range(ORDER):
        q = out[-1]
        out.append(npoly.polyadd(npoly.polyder(q), npoly.polymul(lin, q)))
    return out


@lru_cache(maxsize=None)
def _unit_norms(shape_key: tuple, var: float) -> tuple[np.ndarray, np.ndarray]:
    """Norms of the c = 0, s = 1 profile, optionally smoothed with variance `var`."""
    base = GaussProfile(0.0, 1.0, *shape_key)
    if var == 0.0:
        sup, l1 = _grid_norms(base, -14.0, 14.0, 56_001)
        return CLOSED_SAFETY * sup, CLOSED_SAFETY * l1
    pad = 8.0 * math.sqrt(var)
    sup, l1 = _grid_norms(lambda u, n: _smoothed(base, var, u, n), -14.0 - pad, 14.0 + pad, 8_001)
    return SAMPLED_SAFETY * sup, SAMPLED_SAFETY * l1


# --- dictionaries -----------------------------------------------------------------

D_TAG = "d"
DELTA_TAG = "delta"


@dataclass(eq=False)
class Entry:
    a: Profile
    b: Profile
    tag: str
    label: str = ""
    weight: float = field(init=False, default=1.0)

    def __post_init__(self):
        self.weight = 1.0 / self.bound()

    def bound(self) -> float:
        """M (sup, total order <= 3) for delta entries, A (L^1, each order <= 3) for d entries."""
        sa, la = self.a.norms
        sb, lb = self.b.norms
        if self.tag == DELTA_TAG:
            return max(sa[i] * sb[j] for i in range(ORDER + 1) for j in range(ORDER + 1 - i))
        if self.tag == D_TAG:
            return float(la.max() * lb.max())
        raise ValueError(f"unknown tag {self.tag!r}")

    def normalized_bound(self) -> float:
        return self.bound() * self.weight

    def values(self, q: np.ndarray, p: np.ndarray) -> np.ndarray:
        return self.weight * np.outer(self.a(q), self.b(p))


@dataclass
class TestDictionary:
    __test__ = False  # not a pytest class
    entries: list[Entry]

    def __post_init__(self):
        for e in self.entries:
            if e.normalized_bound() > 1.0 + 1e-12:
                raise ValueError(f"entry {e.label} violates its normalization")

    def of(self, tag: str) -> list[Entry]:
        return [e for e in self.entries if e.tag == tag]

    def __len__(self):
        return len(self.entries)

    def __add__(self, other: "TestDictionary") -> "TestDictionary":
        return TestDictionary(self.entries + other.entries)

    def factors(self, tag: str, q: np.ndarray, p: np.ndarray):
        es = self.of(tag)
        if not es:
            return np.zeros((q.size, 0)), np.zeros((p.size, 0)), np.zeros(0)
        A = np.stack([e.a(q) for e in es], axis=1)
        B = np.stack([e.b(p) for e in es], axis=1)
        return A, B, np.array([e.weight for e in es])


def smoothed_dual(entry: Entry, hbar: float) -> Entry:
    """delta entry g/2 with g = 2 pi hbar (f * G), G of variance hbar/2 per axis.

    For a d-admissible f, trace(F R) = int g W[R] and |d^k g| <= 2 A, so the
    renormalized dual certifies d_lower <= 2 * delta_lower.
    """
    if entry.tag != D_TAG or not isinstance(entry.a, GaussProfile) or not isinstance(entry.b, GaussProfile):
        raise ValueError("smoothed duals are defined for Gaussian-family d entries")
    a = SmoothedProfile(entry.a, hbar / 2)
    b = SmoothedProfile(entry.b, hbar / 2)
    return Entry(a, b, DELTA_TAG, f"dual[{entry.label}]")


def _shapes(c_q, c_p, s):
    yield "bump", GaussProfile(c_q, s), GaussProfile(c_p, s)
    yield "odd_q", GaussProfile(c_q, s, (0.0, 1.0)), GaussProfile(c_p, s)
    yield "odd_p", GaussProfile(c_q, s), GaussProfile(c_p, s, (0.0, 1.0))


def standard_dictionary(hbar: float, box: float = 2.0, step: float = 0.5,
                        scales=(0.25, 0.5, 1.0), kappas=(1.0, 2.0, 4.0),
                        duals: bool = True) -> TestDictionary:
    """Gaussian bumps, odd profiles and enveloped Fourier modes over [-box, box]^2.

    Every shape appears both as a delta entry and as a d entry; with
    ``duals`` the smoothed Toeplitz duals of the d entries and a constant
    are added to the delta side.
    """
    centres = np.arange(-box, box + 1e-9, step)
    entries = []
    for s in scales:
        for cq in centres:
            for cp in centres:
                for name, a, b in _shapes(float(cq), float(cp), s):
                    label = f"{name}(q={cq:g},p={cp:g},s={s:g})"
                    entries.append(Entry(a, b, DELTA_TAG, label))
                    entries.append(Entry(a, b, D_TAG, label))
    coarse = np.arange(-box, box + 1e-9, 2 * step)
    for k in kappas:
        for phase in (0.0, 0.5 * math.pi):
            for cq in coarse:
                for cp in coarse:
                    for axis in ("q", "p"):
                        wave = GaussProfile(float(cq if axis == "q" else cp), 1.0, kappa=k, phase=phase)
                        env = GaussProfile(float(cp if axis == "q" else cq), 1.0)
                        a, b = (wave, env) if axis == "q" else (env, wave)
                        label = f"wave_{axis}(k={k:g},ph={phase:.3g},q={cq:g},p={cp:g})"
                        entries.append(Entry(a, b, DELTA_TAG, label))
                        entries.append(Entry(a, b, D_TAG, label))
    if duals:
        entries += [smoothed_dual(e, hbar) for e in entries if e.tag == D_TAG]
        entries.append(Entry(ConstProfile(1.0), ConstProfile(1.0), DELTA_TAG, "const"))
    return TestDictionary(entries)


def pair_dictionary(z1, z2, hbar: float, widths=(0.25, 0.5, 1.0, 2.0),
                    offsets=(1.0, 1.5, 2.0), duals: bool = False) -> TestDictionary:
    """Entries built on the segment z1 -> z2: convex Gaussian tails and odd ramps.

    The profile varies along the dominant coordinate of z2 - z1 and is a
    Gaussian envelope in the other.  A tail entry is a Gaussian whose centre
    sits ``offset * s`` behind the nearer point, so the segment lies in the
    convex part of the profile; an odd ramp ``y exp(-y^2/2)`` centred at the
    midpoint is monotone across the segment.
    """
    z1, z2 = np.asarray(z1, float), np.asarray(z2, float)
    dz = z2 - z1
    axis = 0 if abs(dz[0]) >= abs(dz[1]) else 1
    mid = 0.5 * (z1 + z2)
    sep = abs(dz[axis])
    direction = math.copysign(1.0, dz[axis]) if sep > 0 else 1.0
    other = mid[1 - axis]
    entries = []
    for w in widths:
        s = max(w * max(sep, 0.2), 1e-3)
        profs = [("ramp", GaussProfile(mid[axis], s, (0.0, 1.0)))]
        for off in offsets:
            # centre behind z1, segment on the decreasing convex tail
            c = mid[axis] - direction * (0.5 * sep + off * s)
            profs.append((f"tail{off:g}", GaussProfile(c, s)))
        for env_w in widths:
            env = GaussProfile(other, env_w)
            for name, prof in profs:
                a, b = (prof, env) if axis == 0 else (env, prof)
                label = f"pair_{name}(s={s:.3g},env={env_w:g})"
                entries.append(Entry(a, b, D_TAG, label))
                entries.append(Entry(a, b, DELTA_TAG, label))
    if duals:
        entries += [smoothed_dual(e, hbar) for e in entries if e.tag == D_TAG]
    return TestDictionary(entries)


# --- weak distances ------------------------------------------------------------------

def _pair_scores(diff: np.ndarray, x: np.ndarray, xi: np.ndarray, cell: float,
                 dictionary: TestDictionary, tag: str) -> np.ndarray:
    A, B, w = dictionary.factors(tag, x, xi)
    if w.size == 0:
        return np.zeros(0)
    return np.einsum("ie,ie->e", A, diff @ B) * w * cell


def weak_delta(W1: PhaseSpaceField, W2: PhaseSpaceField, dictionary: TestDictionary,
               return_index: bool = False):
    """max_i |sum f_i (W1 - W2) dq dxi| over the delta entries."""
    if not W1.same_lattice(W2):
        raise ValueError("fields live on different lattices")
    s = np.abs(_pair_scores(W1.values - W2.values, W1.x, W1.xi, W1.cell, dictionary, DELTA_TAG))
    if s.size == 0:
        return (0.0, -1) if return_index else 0.0
    i = int(np.argmax(s))
    return (float(s[i]), i) if return_index else float(s[i])


def weak_d_lower(psi: WaveFunction, phi: WaveFunction, dictionary: TestDictionary,
                 method: str = "husimi", return_index: bool = False):
    """max_i |<psi, F_i psi> - <phi, F_i phi>| over Toeplitz observables of the d entries.

    ``husimi`` evaluates <psi, F psi> = 2 pi hbar sum f Hus[psi] dq dxi;
    ``toeplitz`` builds the operator matrices (N <= 256).
    """
    hbar = psi.hbar
    if method == "husimi":
        H1, H2 = husimi(psi), husimi(phi)
        s = 2 * np.pi * hbar * np.abs(_pair_scores(H1.values - H2.values, H1.x, H1.xi, H1.cell,
                                                     dictionary, D_TAG))
    elif method == "toeplitz":
        from .phasespace import expectation, toeplitz_quantize, xi_nodes

        x, xi = psi.grid.x, xi_nodes(psi.grid, hbar)
        s = []
        for e in dictionary.of(D_TAG):
            F = toeplitz_quantize(e.values(x, xi), psi.grid, hbar)
            s.append(abs(expectation(F, psi) - expectation(F, phi)))
        s = np.array(s)
    else:
        raise ValueError(f"unknown method {method!r}")
    if s.size == 0:
        return (0.0, -1) if return_index else 0.0
    i = int(np.argmax(s))
    return (float(s[i]), i) if return_index else float(s[i])


# --- optimal transport -----------------------------------------------------------------

@dataclass
class DiscreteMeasure:
    points: np.ndarray  # (n, k)
    weights: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, float)
        if self.points.ndim == 1:
            self.points = self.points[:, None]
        self.weights = np.asarray(self.weights, float).reshape(-1)
        if self.weights.size != self.points.shape[0]:
            raise ValueError("points and weights disagree")
        if np.any(self.weights < 0) or abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must be nonnegative and sum to 1 (sum={self.weights.sum()!r})")

    @classmethod
    def from_ensemble(cls, ens) -> "DiscreteMeasure":
        return cls(ens.points(), ens.w)

    @classmethod
    def uniform(cls, points) -> "DiscreteMeasure":
        points = np.asarray(points, float)
        return cls(points, np.full(len(points), 1.0 / len(points)))

    @property
    def size(self) -> int:
        return self.weights.size


def cost_matrix(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Quadratic phase-space cost |q - q'|^2 + |p - p'|^2 (expanded form, clipped at 0)."""
    return np.maximum(np.sum(x**2, 1)[:, None] + np.sum(y**2, 1)[None, :] - 2.0 * x @ y.T, 0.0)


def _exact_cost(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.sum((x[:, None, :] - y[None, :, :]) ** 2, axis=-1)


def w2_exact(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Exact W2 by linear programming.

    Equal-size uniform measures are solved as an assignment problem
    (an optimal plan of the LP is a permutation); otherwise the
    transportation LP goes to a dual simplex solver.
    """
    n, m = mu.size, nu.size
    if n > W2_CAP or m > W2_CAP:
        raise SizeCapError(f"exact OT limited to {W2_CAP} points per measure")
    C = _exact_cost(mu.points, nu.points)
    uniform = n == m and np.all(mu.weights == mu.weights[0]) and np.all(nu.weights == nu.weights[0])
    if uniform:
        r, c = linear_sum_assignment(C)
        return math.sqrt(max(float(C[r, c].sum()) / n, 0.0))
    A_eq = np.zeros((n + m, n * m))
    for i in range(n):
        A_eq[i, i * m:(i + 1) * m] = 1.0
    for j in range(m):
        A_eq[n + j, j::m] = 1.0
    b_eq = np.concatenate([mu.weights, nu.weights])
    res = linprog(C.ravel(), A_eq=A_eq[:-1], b_eq=b_eq[:-1], bounds=(0, None), method="highs-ds",
                  options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise ConvergenceError(f"transport LP failed: {res.message}")
    plan = np.clip(res.x, 0.0, None)
    return math.sqrt(max(float(plan @ C.ravel()), 0.0))


@dataclass
class SinkhornResult:
    value: float  # sqrt(<P, C>) of the entropic plan
    reg: float
    iterations: int
    marginal_error: float

    def __float__(self):
        return self.value


def _lse_rows(z: np.ndarray) -> np.ndarray:
    # scipy's logsumexp carries array-API overhead that dominates small solves
    zmax = z.max(axis=1)
    zmax = np.where(np.isfinite(zmax), zmax, 0.0)
    return np.log(np.exp(z - zmax[:, None]).sum(axis=1)) + zmax


def _softmin(pot: np.ndarray, logw: np.ndarray, x: np.ndarray, y: np.ndarray, reg: float,
             C: np.ndarray | None, chunk: int = 2048) -> np.ndarray:
    """-reg log sum_j w_j exp((pot_j - C_ij)/reg) for each row i."""
    if C is not None:
        return -reg * _lse_rows((pot[None, :] - C) / reg + logw[None, :])
    out = np.empty(x.shape[0])
    for s in range(0, x.shape[0], chunk):
        Cb = cost_matrix(x[s:s + chunk], y)
        out[s:s + chunk] = -reg * _lse_rows((pot[None, :] - Cb) / reg + logw[None, :])
    return out


def _plan_cost(f, g, la, lb, x, y, reg, C, chunk=2048) -> float:
    """<P, C> for P_ij = a_i b_j exp((f_i + g_j - C_ij)/reg)."""
    cost = 0.0
    for s in range(0, x.shape[0], chunk):
        Cb = C[s:s + chunk] if C is not None else cost_matrix(x[s:s + chunk], y)
        P = np.exp((f[s:s + chunk, None] + g[None, :] - Cb) / reg + la[s:s + chunk, None] + lb[None, :])
        cost += float(np.sum(P * Cb))
    return cost


def _marginal_violation(f, g, la, lb, x, y, reg, C, chunk=2048) -> float:
    """|P 1 - a|_1 + |P^T 1 - b|_1 for the plan of the potentials (f, g)."""
    a, b = np.exp(la), np.exp(lb)
    rows = np.empty(x.shape[0])
    cols = np.zeros(y.shape[0])
    with np.errstate(over="ignore"):
        for s in range(0, x.shape[0], chunk):
            Cb = C[s:s + chunk] if C is not None else cost_matrix(x[s:s + chunk], y)
            P = np.exp((f[s:s + chunk, None] + g[None, :] - Cb) / reg + la[s:s + chunk, None] + lb[None, :])
            rows[s:s + chunk] = P.sum(axis=1)
            cols += P.sum(axis=0)
    return float(np.abs(rows - a).sum() + np.abs(cols - b).sum())


def _newton_polish(g, la, lb, reg, C, tol, max_iter=100):
    """Newton ascent on the semi-dual g -> <b, g> + <a, f(g)> with f = softmin(g).

    Rows are exact after every step; the column violation |b - P^T 1|_1
    converges quadratically once the warm start is inside the basin.
    """
    a, b = np.exp(la), np.exp(lb)

    def state(g):
        f = _softmin(g, lb, None, None, reg, C)
        P = np.exp((f[:, None] + g[None, :] - C) / reg + la[:, None] + lb[None, :])
        return f, P, float(b @ g + a @ f)

    f, P, J = state(g)
    err = np.inf
    for _ in range(max_iter):
        col = P.sum(axis=0)
        grad = b - col
        err = float(np.abs(grad).sum())
        if err < tol:
            break
        # negative Hessian, with the constant null direction pinned by b b^T
        H = (np.diag(col) - (P.T / a[None, :]) @ P + np.outer(b, b)) / reg
        step = np.linalg.solve(H, grad)
        s = 1.0
        while True:
            f2, P2, J2 = state(g + s * step)
            if J2 >= J - 1e-14 * abs(J) or s < 1e-8:
                break
            s *= 0.5
        g, f, P, J = g + s * step, f2, P2, J2
    return f, g, err


def w2_sinkhorn(mu: DiscreteMeasure, nu: DiscreteMeasure, reg: float = 1e-3,
                iters: int = 20_000, tol: float = 1e-8, scaling: float = 0.5) -> SinkhornResult:
    """Entropic W2: log-domain Sinkhorn with reg-annealing warm starts.

    Plain Sinkhorn contracts slowly once cost/reg is large, so when the
    cost matrix fits in memory each annealing stage is a short run of
    Sinkhorn sweeps followed by Newton steps on the semi-dual.  The returned value is sqrt(<P, C>) for the
    converged entropic plan P, which is biased upward relative to the
    exact W2; ``reg`` is reported.
    """
    if reg <= 0:
        raise ValueError("reg must be positive")
    n, m = mu.size, nu.size
    if n > SINKHORN_CAP or m > SINKHORN_CAP:
        raise SizeCapError(f"Sinkhorn limited to {SINKHORN_CAP} points per measure")
    x, y = mu.points, nu.points
    with np.errstate(divide="ignore"):
        la, lb = np.log(mu.weights), np.log(nu.weights)
    C = cost_matrix(x, y) if n * m <= 4_000_000 else None
    if C is not None:
        cmax = float(C.max())
    else:
        span = np.ptp(np.vstack([x, y]), axis=0)
        cmax = float(span @ span)
    newton = (C is not None and m <= NEWTON_CAP
              and np.all(np.isfinite(la)) and np.all(np.isfinite(lb)))
    f, g = np.zeros(n), np.zeros(m)
    schedule = []
    r = max(cmax, reg)
    while r > reg:
        schedule.append(r)
        r *= scaling
    schedule.append(reg)
    total = 0
    err = np.inf
    for k, r in enumerate(schedule):
        last = k == len(schedule) - 1
        if newton:
            stage_tol, budget = WARM_TOL, STAGE_ITERS
        else:
            stage_tol, budget = (tol, iters - total) if last else (1e-3, STAGE_ITERS)
        stop = min(total + budget, iters)
        while total < stop:
            f = _softmin(g, lb, x, y, r, C)
            g = _softmin(f, la, y, x, r, None if C is None else C.T)
            total += 1
            if total % 10 == 0:
                # g is exact for the columns, so only the row marginal can be off
                f_next = _softmin(g, lb, x, y, r, C)
                err = float(np.sum(np.abs(mu.weights * (np.exp((f - f_next) / r) - 1.0))))
                if err < stage_tol:
                    break
        if newton:
            f, g, err = _newton_polish(g, la, lb, r, C, tol if last else 1e-3)
    # certify the returned potentials at the target reg, whichever path produced them
    err = _marginal_violation(f, g, la, lb, x, y, reg, C)
    if not err < tol:
        raise ConvergenceError(f"Sinkhorn marginal error {err:.2e} after {total} iterations (reg={reg:g})")
    cost = _plan_cost(f, g, la, lb, x, y, reg, C)
    return SinkhornResult(math.sqrt(max(cost, 0.0)), reg, total, err)


# --- closed-form MK upper bounds -------------------------------------------------------

def mk_self_upper(psi: WaveFunction) -> float:
    """Upper bound sqrt(2) * Delta(psi) on the quantum self-distance of a pure state."""
    return math.sqrt(2.0) * delta_spread(psi)


def mk_self_upper_toeplitz(hbar: float, d: int = 1) -> float:
    """Self-distance bound for Toeplitz initial data, squared bound 2 d hbar."""
    return math.sqrt(2.0 * d * hbar)


def mk_coherent_upper(z1, z2, hbar: float, d: int = 1) -> float:
    dz = np.asarray(z1, float) - np.asarray(z2, float)
    return math.sqrt(float(dz @ dz) + 2.0 * d * hbar)
