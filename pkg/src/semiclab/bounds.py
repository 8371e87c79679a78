"""Explicit constants and right-hand sides of the perturbation inequalities.

Notation: Lambda = 1 - lam + mu Lip(grad V) is the Gronwall rate and
phi(t) = (exp(|t| Lambda) - 1)/Lambda (continuous at Lambda = 0).  The
squared weak distance between the unperturbed and perturbed evolutions is
bounded by ``C(t) eps + D(t) hbar^(2 alpha)`` with

    gamma(t) = phi(t) |grad U| [sqrt(E0 + 2 mu|V|) + sqrt(Eeps + 2 mu|V| + 2 eps|U|)]
    C(t)     = 2^(2d+1) gamma(t)
    D(t)     = exp(|t| Lambda) 2^(2d+1) (D' + C_d^2)

where D' bounds the squared initial self-distance in units of hbar^(2 alpha).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict

SERIES_SWITCH = 1e-6
ENVELOPES = ("min", "max")


def lambda_rate(lam: float, mu: float, lip_grad_v: float) -> float:
    if lam > 1 or min(lam, mu, lip_grad_v) < 0:
        raise ValueError("need 0 <= lam <= 1 and mu, Lip >= 0")
    return 1.0 - lam + mu * lip_grad_v


def gronwall_phi(t: float, rate: float) -> float:
    """(exp(|t| rate) - 1)/rate, equal to |t| at rate = 0."""
    t = abs(t)
    z = t * rate
    if abs(z) < SERIES_SWITCH:
        return t * (1.0 + z / 2.0 + z * z / 6.0)
    return math.expm1(z) / rate


def gamma_aggregate(t: float, rate: float, grad_u: float, e0: float, e_eps: float,
                    mu_v: float, eps_u: float) -> float:
    """gamma(t); mu_v = mu |V|_inf and eps_u = eps |U|_inf."""
    if min(grad_u, e0, e_eps, mu_v, eps_u) < 0:
        raise ValueError("gamma inputs must be nonnegative")
    root = math.sqrt(e0 + 2 * mu_v) + math.sqrt(e_eps + 2 * mu_v + 2 * eps_u)
    return gronwall_phi(t, rate) * grad_u * root


def cd_constant(d: int) -> tuple[float, float]:
    """(C_d, gamma_d) with gamma_d at its Calderon-Vaillancourt upper estimate."""
    if d < 1:
        raise ValueError("d >= 1")
    gamma_d = (d**0.75 * (192 * math.exp(-0.25) * math.pi**-1.25) ** d
               / (4 * math.exp(0.25)) * (d**d) ** 2.75)
    return 2 * d * (1 + gamma_d / math.sqrt(math.pi)), gamma_d


def d_prime(delta_in: float, hbar: float, alpha: float = 0.5, toeplitz: bool = False, d: int = 1) -> float:
    """Coefficient D' with squared initial self-distance <= D' hbar^(2 alpha)."""
    if toeplitz:
        return 2.0 * d
    return 2.0 * delta_in**2 / hbar ** (2 * alpha)


@dataclass(frozen=True)
class BoundConstants:
    d: int
    lam: float
    mu: float
    norm_v: float
    lip_grad_v: float
    norm_u: float
    grad_u: float
    e0: float
    e_eps: float
    e_full: float
    delta_in: float
    hbar: float
    alpha: float = 0.5
    toeplitz: bool = False

    @property
    def rate(self) -> float:
        return lambda_rate(self.lam, self.mu, self.lip_grad_v)

    @property
    def cd(self) -> float:
        return cd_constant(self.d)[0]

    @property
    def dprime(self) -> float:
        return d_prime(self.delta_in, self.hbar, self.alpha, self.toeplitz, self.d)

    def gamma(self, t: float, eps: float) -> float:
        return gamma_aggregate(t, self.rate, self.grad_u, self.e0, self.e_eps,
                               self.mu * self.norm_v, eps * self.norm_u)

    def C(self, t: float, eps: float) -> float:
        return 2 ** (2 * self.d + 1) * self.gamma(t, eps)

    def D(self, t: float) -> float:
        return math.exp(abs(t) * self.rate) * 2 ** (2 * self.d + 1) * (self.dprime + self.cd**2)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Theorem1RHS:
    value: float
    C: float
    D: float
    gamma: float


def theorem1_rhs(t: float, eps: float, hbar: float, k: BoundConstants) -> Theorem1RHS:
    """C(t) eps + D(t) hbar^(2 alpha)."""
    C, D = k.C(t, eps), k.D(t)
    return Theorem1RHS(C * eps + D * hbar ** (2 * k.alpha), C, D, k.gamma(t, eps))


def duhamel_rhs(t: float, eps: float, hbar: float, norm_u: float) -> float:
    """2 |t| eps |U|_inf / hbar."""
    return 2.0 * abs(t) * eps * norm_u / hbar


def duhamel_vacuous(rhs: float) -> bool:
    """Pure-state trace distances never exceed 2."""
    return rhs > 2.0


@dataclass(frozen=True)
class Corollary2RHS:
    value: float  # E(t) eps^(1/3)
    E: float
    branch_thm1: float  # sqrt(C eps + D hbar^(2 alpha))
    branch_duhamel: float  # 2 |t| eps |U| / hbar
    envelope: str
    power: int

    @property
    def branch_min(self) -> float:
        return min(self.branch_thm1, self.branch_duhamel)


def corollary2_rhs(t: float, eps: float, hbar: float, k: BoundConstants, power: int = 1,
                   envelope: str = "min") -> Corollary2RHS:
    """E(t) eps^(1/3) with E = env(sqrt(C + D), 2|t| |U|^power).

    ``power`` = 1 matches the first-power Duhamel branch, 2 squares the
    norm.  ``envelope`` = 'max' is what splitting at hbar = eps^(2/3)
    delivers; 'min' is the stronger form, which fails once the Duhamel
    branch is the smaller constant and hbar < eps^(2/3).
    """
    if power not in (1, 2):
        raise ValueError("power must be 1 or 2")
    if envelope not in ENVELOPES:
        raise ValueError(f"envelope must be one of {ENVELOPES}")
    r = theorem1_rhs(t, eps, hbar, k)
    a = math.sqrt(r.C + r.D)
    b = 2.0 * abs(t) * k.norm_u**power
    E = min(a, b) if envelope == "min" else max(a, b)
    return Corollary2RHS(E * eps ** (1.0 / 3.0), E, math.sqrt(r.value),
                         duhamel_rhs(t, eps, hbar, k.norm_u), envelope, power)


def sandwich_upper(z1, z2, hbar: float, d: int = 1) -> float:
    """2^d sqrt(|z1 - z2|^2 + 2 d hbar) + C_d hbar, the upper bound on 2^d d(psi_z1, psi_z2)."""
    dz2 = sum((a - b) ** 2 for a, b in zip(z1, z2))
    return 2**d * math.sqrt(dz2 + 2 * d * hbar) + cd_constant(d)[0] * hbar


def classical_limit_rhs(t: float, eps: float, k: BoundConstants, tol_ot: float = 0.0) -> float:
    """exp(|t| Lambda) 2 Delta_in^2 + gamma(t) eps + 2 d hbar + tol_ot (squared W2 budget)."""
    return (math.exp(abs(t) * k.rate) * 2 * k.delta_in**2 + k.gamma(t, eps) * eps
            + 2 * k.d * k.hbar + tol_ot)
