"""Scenario configuration: flat ``key = value`` text files.

Lines are ``key = value``; ``#`` starts a comment; list values are
comma-separated; potentials use the grammar of :mod:`semiclab.potentials`,
e.g. ``U = abs_sin(a=0.7, omega=1.0)``.  Floats are written with ``repr``
so a config survives a write/read round trip exactly.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from .classical import CONVENTIONS, LIOUVILLE
from .errors import ConfigError, NyquistError, ResolutionError
from .lattice import SpatialGrid
from .potentials import C11, W1INF, PotentialSpec, parse as parse_potential

# minimum number of grid points per coherent-state width sqrt(hbar)
RESOLUTION_MIN = 3.0
STATES = ("coherent", "squeezed")
DICTIONARIES = ("standard", "none")


def _zero():
    return PotentialSpec("zero")


def _abs_sin():
    return PotentialSpec("abs_sin", {"a": 0.7, "omega": 1.0})


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str = "reference"
    d: int = 1
    L: float = 10.0
    N: int = 512
    hbar: tuple = (0.05, 0.1, 0.2)
    eps: tuple = (1e-3, 1e-2, 1e-1)
    t: tuple = (0.5, 1.0, 2.0)
    dt: float = 1e-3
    lam: float = 1.0
    mu: float = 0.0
    V: PotentialSpec = field(default_factory=_zero)
    U: PotentialSpec = field(default_factory=_abs_sin)
    state: str = "coherent"
    q0: tuple = (1.0,)
    p0: tuple = (0.0,)
    width: float = 0.0  # squeezed states only
    dictionary: str = "standard"
    dict_box: float = 2.0
    dict_step: float = 0.5
    ot_n: int = 400
    ot_resamples: int = 4
    ot_reg: float = 1e-3
    seed: int = 0
    flow_lambda_convention: str = LIOUVILLE
    alpha: float = 0.5
    cor2_power: int = 1
    cor2_envelope: str = "min"
    coherent_seps: tuple = (0.2, 0.5, 1.0, 1.5, 2.0)
    classical_monotone_eps: float = 1e-2
    out: str = "out"

    def __post_init__(self):
        try:
            self.grid
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.V.regularity != C11:
            raise ConfigError(f"V must be C11-tagged, got {self.V}")
        if self.U.regularity != W1INF and self.U.kind != "zero":
            raise ConfigError(f"U must be a W1inf perturbation, got {self.U}")
        for name in ("lam", "mu"):
            if not 0 <= getattr(self, name) <= 1:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if any(not 0 <= e <= 1 for e in self.eps):
            raise ConfigError("eps values must lie in [0, 1]")
        if any(not 0 < h <= 1 for h in self.hbar):
            raise ConfigError("hbar values must lie in (0, 1]")
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.state not in STATES:
            raise ConfigError(f"state must be one of {STATES}")
        if self.state == "squeezed" and self.width <= 0:
            raise ConfigError("squeezed state needs width > 0")
        if self.dictionary not in DICTIONARIES:
            raise ConfigError(f"dictionary must be one of {DICTIONARIES}")
        if self.flow_lambda_convention not in CONVENTIONS:
            raise ConfigError(f"flow_lambda_convention must be one of {CONVENTIONS}")
        if not 0 < self.alpha <= 0.5:
            raise ConfigError("alpha must lie in (0, 1/2]")
        if self.cor2_power not in (1, 2) or self.cor2_envelope not in ("min", "max"):
            raise ConfigError("cor2_power in {1, 2}, cor2_envelope in {min, max}")
        if len(self.q0) != self.d or len(self.p0) != self.d:
            raise ConfigError("q0 and p0 need d components")
        if self.ot_n < 1 or self.ot_resamples < 1 or self.ot_reg <= 0:
            raise ConfigError("OT settings must be positive")

    @property
    def grid(self) -> SpatialGrid:
        return SpatialGrid(self.d, self.L, self.N)

    def state_width(self, hbar: float) -> float:
        return math.sqrt(hbar) if self.state == "coherent" else self.width

    def check_guards(self) -> None:
        """Resolution and Nyquist checks that need no propagation."""
        g = self.grid
        for h in self.hbar:
            pts = math.sqrt(h) / g.dx
            if pts < RESOLUTION_MIN:
                raise ResolutionError(
                    f"hbar={h}: {pts:.2f} grid points per sqrt(hbar), need {RESOLUTION_MIN}"
                )
            reach = math.hypot(math.hypot(*self.q0), math.hypot(*self.p0)) + 6 * math.sqrt(h / 2)
            if reach > 0.5 * g.p_max(h):
                raise NyquistError(
                    f"hbar={h}: momentum reach {reach:.3g} exceeds half band {0.5 * g.p_max(h):.3g}"
                )

    def replace(self, **kw) -> "ScenarioConfig":
        return dataclasses.replace(self, **kw)


# --- text serialization ----------------------------------------------------------

_TUPLE_FLOAT = {"hbar", "eps", "t", "q0", "p0", "coherent_seps"}


def _field_types():
    return {f.name: f for f in fields(ScenarioConfig)}


def _fmt(v) -> str:
    if isinstance(v, tuple):
        return ", ".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dumps(cfg: ScenarioConfig) -> str:
    lines = [f"{f.name} = {_fmt(getattr(cfg, f.name))}" for f in fields(cfg)]
    return "\n".join(lines) + "\n"


def _convert(name: str, raw: str, default):
    try:
        if name in _TUPLE_FLOAT:
            return tuple(float(x) for x in raw.split(",") if x.strip())
        if isinstance(default, PotentialSpec):
            return parse_potential(raw)
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r} ({exc})") from None


def loads(text: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    base = base or ScenarioConfig()
    known = _field_types()
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value")
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, raw.strip(), getattr(base, key))
    return dataclasses.replace(base, **values)


def load(path) -> ScenarioConfig:
    return loads(Path(path).read_text())


def save(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(dumps(cfg))
