"""Potential catalogue: C^{1,1} potentials V and W^{1,inf} perturbations U.

Multi-dimensional entries are tensor products of the 1D profile, e.g.
``cos(a, omega)`` is ``a * prod_k cos(omega x_k)``.

Specs are written in config files as ``kind(param=value, ...)``::

    spec     := kind [ "(" [ param ( "," param )* ] ")" ]
    param    := name "=" float
    kind     := zero | harmonic | cos | gauss | abs_sin | sawtooth_clip

Parameters omitted fall back to the catalogue defaults.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

C11 = "C11"
W1INF = "W1inf"

# kind -> (regularity, default parameters)
CATALOGUE: dict[str, tuple[str, dict[str, float]]] = {
    "zero": (C11, {}),
    "harmonic": (C11, {"lam": 1.0}),
    "cos": (C11, {"a": 1.0, "omega": 1.0}),
    "gauss": (C11, {"a": 1.0, "s": 1.0}),
    "abs_sin": (W1INF, {"a": 1.0, "omega": 1.0}),
    "sawtooth_clip": (W1INF, {"a": 1.0}),
}

_KINK_ATOL = 1e-12


class Estimate(NamedTuple):
    value: float
    exact: bool


@dataclass(frozen=True)
class PotentialSpec:
    kind: str
    params: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in CATALOGUE:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        defaults = CATALOGUE[self.kind][1]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ValueError(f"unknown parameters for {self.kind}: {sorted(unknown)}")
        object.__setattr__(self, "params", {**defaults, **{k: float(v) for k, v in self.params.items()}})

    @property
    def regularity(self) -> str:
        return CATALOGUE[self.kind][0]

    def __getitem__(self, name: str) -> float:
        return self.params[name]

    def __str__(self) -> str:
        if not self.params:
            return self.kind
        inner = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{self.kind}({inner})"

    def __hash__(self):
        return hash((self.kind, tuple(sorted(self.params.items()))))


_SPEC_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def parse(text: str) -> PotentialSpec:
    m = _SPEC_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse potential spec {text!r}")
    kind, body = m.group(1), m.group(2)
    params = {}
    if body and body.strip():
        for item in body.split(","):
            name, sep, value = item.partition("=")
            if not sep:
                raise ValueError(f"expected name=value in {text!r}, got {item!r}")
            params[name.strip()] = float(value)
    return PotentialSpec(kind, params)


# --- 1D profiles and their derivatives -------------------------------------

def _profile(spec: PotentialSpec, x: np.ndarray):
    """Return (f, f', kink) for the per-axis factor; f' is the left limit at kinks."""
    k = spec.kind
    if k == "cos":
        w = spec["omega"]
        return np.cos(w * x), -w * np.sin(w * x), np.zeros(np.shape(x), bool)
    if k == "abs_sin":
        w = spec["omega"]
        s = np.sin(w * x)
        kink = np.abs(s) < _KINK_ATOL
        # left limit at every zero of sin is -omega
        df = np.where(kink, -w, w * np.cos(w * x) * np.sign(s))
        return np.abs(s), df, kink
    if k == "sawtooth_clip":
        r = x - 2.0 * np.round(x / 2.0)
        kink = np.abs(x - np.round(x)) < _KINK_ATOL
        odd = np.round(x).astype(np.int64) % 2 == 1
        df = np.where(kink, np.where(odd, 1.0, -1.0), np.sign(r))
        return np.abs(r), df, kink
    raise AssertionError(k)


def evaluate(spec: PotentialSpec, *coords) -> np.ndarray:
    xs = [np.asarray(c, dtype=float) for c in coords]
    k = spec.kind
    if k == "zero":
        return np.zeros(np.broadcast(*xs).shape)
    if k == "harmonic":
        return 0.5 * spec["lam"] * sum(x**2 for x in xs)
    if k == "gauss":
        r2 = sum(x**2 for x in xs)
        return -spec["a"] * np.exp(-r2 / (2 * spec["s"] ** 2))
    out = spec["a"]
    for x in xs:
        out = out * _profile(spec, x)[0]
    return np.asarray(out, dtype=float)


def gradient(spec: PotentialSpec, *coords) -> tuple[np.ndarray, np.ndarray]:
    """Gradient (stacked along axis 0) and a boolean kink mask.

    At a kink of a W1inf entry the left-limit value is returned and the
    mask is set.
    """
    xs = [np.asarray(c, dtype=float) for c in coords]
    shape = np.broadcast(*xs).shape
    xs = [np.broadcast_to(x, shape) for x in xs]
    k = spec.kind
    if k == "zero":
        return np.zeros((len(xs),) + shape), np.zeros(shape, bool)
    if k == "harmonic":
        return spec["lam"] * np.stack(xs), np.zeros(shape, bool)
    if k == "gauss":
        s2 = spec["s"] ** 2
        g = spec["a"] / s2 * np.exp(-sum(x**2 for x in xs) / (2 * s2))
        return np.stack([g * x for x in xs]), np.zeros(shape, bool)
    prof = [_profile(spec, x) for x in xs]
    grads = []
    for i in range(len(xs)):
        g = spec["a"] * prof[i][1]
        for j in range(len(xs)):
            if j != i:
                g = g * prof[j][0]
        grads.append(g)
    kink = np.logical_or.reduce([p[2] for p in prof])
    return np.stack(grads), kink


# --- norms and Lipschitz constants -----------------------------------------

def _closed_sup(spec: PotentialSpec, d: int) -> tuple[float, float] | None:
    k, p = spec.kind, spec.params
    if k == "zero":
        return 0.0, 0.0
    if k == "harmonic":
        return np.inf, np.inf
    a = abs(p.get("a", 0.0))
    if k in ("cos", "abs_sin"):
        return a, a * p["omega"]
    if k == "gauss":
        return a, a * np.exp(-0.5) / p["s"]
    if k == "sawtooth_clip":
        return a, a * np.sqrt(d)
    return None


def _sample_axes(d: int, L: float, n: int):
    x = np.linspace(-L, L, n)
    if d == 1:
        return (x,), x[1] - x[0]
    return tuple(np.meshgrid(x, x, indexing="ij")), x[1] - x[0]


def sup_norm(spec: PotentialSpec, d: int = 1, L: float = 10.0, N: int = 512,
             method: str = "auto") -> Estimate:
    closed = _closed_sup(spec, d)
    if method == "auto" and closed is not None:
        return Estimate(closed[0], True)
    coords, _ = _sample_axes(d, L, 10 * N)
    return Estimate(float(np.max(np.abs(evaluate(spec, *coords)))), False)


def sup_norm_gradient(spec: PotentialSpec, d: int = 1, L: float = 10.0, N: int = 512,
                      method: str = "auto") -> Estimate:
    closed = _closed_sup(spec, d)
    if method == "auto" and closed is not None:
        return Estimate(closed[1], True)
    coords, _ = _sample_axes(d, L, 10 * N)
    g, _ = gradient(spec, *coords)
    return Estimate(float(np.max(np.sqrt(np.sum(g**2, axis=0)))), False)


def lipschitz_gradient(spec: PotentialSpec, d: int = 1, L: float = 10.0, N: int = 512,
                       method: str = "auto") -> Estimate:
    """Lip(grad V); only defined for C11-tagged entries."""
    if spec.regularity != C11:
        raise ValueError(f"Lip(grad) undefined for {spec.regularity} potential {spec}")
    k, p = spec.kind, spec.params
    if method == "auto":
        if k == "zero":
            return Estimate(0.0, True)
        if k == "harmonic":
            return Estimate(abs(p["lam"]), True)
        if k == "cos":
            return Estimate(abs(p["a"]) * p["omega"] ** 2, True)
        if k == "gauss":
            return Estimate(abs(p["a"]) / p["s"] ** 2, True)
    coords, h = _sample_axes(d, L, 10 * N)
    g, _ = gradient(spec, *coords)
    best = 0.0
    for axis in range(d):
        diff = np.diff(g, axis=axis + 1)
        best = max(best, float(np.max(np.sqrt(np.sum(diff**2, axis=0)))) / h)
    return Estimate(best, False)
