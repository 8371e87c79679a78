"""Sweep orchestration and verification drivers.

Every (hbar, eps, t) cell is computed from scratch: the same initial state
is propagated with and without the perturbation, then all measured
distances and bound right-hand sides are evaluated.  Cells are
independent, so they can run on a process pool; results are merged in
(hbar, eps, t) order, which keeps the CSV output byte-identical for any
worker count.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import bounds as B
from . import classical, metrics, oracle, phasespace, potentials, quantum, report
from .config import ScenarioConfig, dumps
from .errors import GuardError

log = logging.getLogger(__name__)

GUARD_FLAGS = {"boundary", "nyquist", "resolution", "norm", "guard"}
DUHAMEL_SLACK = 1e-6
EPS_SLOPE_MAX = 0.6
COHERENT_SLOPE_MIN = 0.1
OT_TOL_FACTOR = 3.0


# --- building blocks --------------------------------------------------------------

def initial_state(cfg: ScenarioConfig, hbar: float) -> quantum.WaveFunction:
    if cfg.state == "coherent":
        return quantum.coherent_state(cfg.grid, hbar, cfg.q0, cfg.p0)
    return quantum.squeezed_state(cfg.grid, hbar, cfg.q0, cfg.p0, cfg.width)


def hamiltonian(cfg: ScenarioConfig, eps: float) -> quantum.HamiltonianSpec:
    return quantum.HamiltonianSpec(cfg.lam, cfg.mu, eps, cfg.V, cfg.U)


def constants(cfg: ScenarioConfig, hbar: float, psi_in: quantum.WaveFunction) -> B.BoundConstants:
    d, L, N = cfg.d, cfg.L, cfg.N
    e0 = quantum.energy(psi_in, cfg.lam)
    return B.BoundConstants(
        d=d, lam=cfg.lam, mu=cfg.mu,
        norm_v=potentials.sup_norm(cfg.V, d, L, N).value if cfg.mu else 0.0,
        lip_grad_v=potentials.lipschitz_gradient(cfg.V, d, L, N).value if cfg.mu else 0.0,
        norm_u=potentials.sup_norm(cfg.U, d, L, N).value,
        grad_u=potentials.sup_norm_gradient(cfg.U, d, L, N).value,
        e0=e0, e_eps=e0,  # both evolutions start from the same state
        e_full=quantum.energy(psi_in, 1.0),
        delta_in=quantum.delta_spread(psi_in), hbar=hbar, alpha=cfg.alpha,
    )


@lru_cache(maxsize=8)
def _standard_dictionary(hbar: float, box: float, step: float) -> metrics.TestDictionary:
    return metrics.standard_dictionary(hbar, box=box, step=step)


def dictionary_for(cfg: ScenarioConfig, hbar: float) -> metrics.TestDictionary:
    if cfg.dictionary == "none":
        return metrics.TestDictionary([])
    return _standard_dictionary(hbar, cfg.dict_box, cfg.dict_step)


def cell_seed(cfg: ScenarioConfig, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([cfg.seed, *key])


def _seeds(ss: np.random.SeedSequence, n: int) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in ss.spawn(n)]


def _classical_samples(cfg, psi_in, psi_t, T, seeds):
    ens_in = classical.sample_from_field(phasespace.husimi(psi_in), cfg.ot_n, seeds[0])
    pushed = classical.pushforward(ens_in, cfg.lam, cfg.mu, cfg.V, T, cfg.dt, cfg.flow_lambda_convention)
    ens_t = classical.sample_from_field(phasespace.husimi(psi_t), cfg.ot_n, seeds[1])
    return metrics.DiscreteMeasure.from_ensemble(ens_t), metrics.DiscreteMeasure.from_ensemble(pushed)


def classical_w2(cfg: ScenarioConfig, psi_in, psi_t, T: float, ss: np.random.SeedSequence,
                 resamples: int = 0, entropic: bool = False):
    """W2 between Husimi[psi_t] samples and the flow image of Husimi[psi_in] samples.

    Returns (w2, noise) where, with ``resamples`` > 0, noise is the mean
    squared W2 between independent sample sets of Husimi[psi_t] (the
    sampling-noise floor).  With ``entropic`` a third entry holds the
    Sinkhorn estimate at ``cfg.ot_reg`` on the same samples.
    """
    seeds = _seeds(ss, 2 + 2 * resamples)
    h_t = phasespace.husimi(psi_t)
    a, b = _classical_samples(cfg, psi_in, psi_t, T, seeds)
    w2 = metrics.w2_exact(a, b)
    noise = 0.0
    for k in range(resamples):
        r1 = classical.sample_from_field(h_t, cfg.ot_n, seeds[2 + 2 * k])
        r2 = classical.sample_from_field(h_t, cfg.ot_n, seeds[3 + 2 * k])
        noise += metrics.w2_exact(metrics.DiscreteMeasure.from_ensemble(r1),
                                  metrics.DiscreteMeasure.from_ensemble(r2)) ** 2
    if entropic:
        return w2, noise / max(resamples, 1), metrics.w2_sinkhorn(a, b, reg=cfg.ot_reg).value
    return w2, noise / max(resamples, 1)


# --- sweep ---------------------------------------------------------------------------

def _bound_fields(cfg, k, hbar, eps, t) -> dict:
    r = B.theorem1_rhs(t, eps, hbar, k)
    cor = B.corollary2_rhs(t, eps, hbar, k, cfg.cor2_power, cfg.cor2_envelope)
    return {
        "Delta_in": k.delta_in, "E0": k.e0, "Eeps": k.e_eps, "Lambda": k.rate,
        "gamma_t": r.gamma, "C_t": r.C, "D_t": r.D, "E_t": cor.E,
        "rhs_thm1": r.value, "rhs_duhamel": B.duhamel_rhs(t, eps, hbar, k.norm_u),
        "rhs_cor2": cor.value, "branch_thm1": cor.branch_thm1, "branch_duhamel": cor.branch_duhamel,
    }


def compute_cell(cfg: ScenarioConfig, ih: int, ie: int, it: int) -> dict:
    hbar, eps, t = cfg.hbar[ih], cfg.eps[ie], cfg.t[it]
    row = {"scenario": cfg.scenario, "hbar": hbar, "eps": eps, "t": t}
    nan = float("nan")
    try:
        psi_in = initial_state(cfg, hbar)
        k = constants(cfg, hbar, psi_in)
        row.update(_bound_fields(cfg, k, hbar, eps, t))
        psi0 = quantum.propagate(psi_in, hamiltonian(cfg, 0.0), t, cfg.dt)
        psie = quantum.propagate(psi_in, hamiltonian(cfg, eps), t, cfg.dt)
        W0, We = phasespace.wigner(psi0), phasespace.wigner(psie)
        dic = dictionary_for(cfg, hbar)
        row["delta_meas"] = metrics.weak_delta(W0, We, dic)
        row["d_lower"] = metrics.weak_d_lower(psi0, psie, dic)
        row["trace_dist"] = quantum.trace_distance_pure(psi0, psie)
        row["w2"], _ = classical_w2(cfg, psi_in, psie, t, cell_seed(cfg, ih, ie, it))
        flags = ["duhamel_vacuous"] if B.duhamel_vacuous(row["rhs_duhamel"]) else []
    except GuardError as exc:
        log.warning("cell hbar=%g eps=%g t=%g: %s", hbar, eps, t, exc)
        for key in ("delta_meas", "d_lower", "trace_dist", "w2"):
            row[key] = nan
        for key in report.BOUND_COLUMNS[8:19]:
            row.setdefault(key, nan)
        row.setdefault("branch_thm1", nan)
        row.setdefault("branch_duhamel", nan)
        flags = [exc.flag]
    row["guard_flags"] = ";".join(flags)
    row.update(pass_flags(row, cfg.d))
    return row


def pass_flags(row: dict, d: int = 1) -> dict:
    """Inequality verdicts; every input is a column of the row."""
    if is_guard_row(row):
        return {"pass_thm1": False, "pass_duhamel": False, "pass_cor2": False}
    rhs = row["rhs_thm1"]
    thm1 = (2**d * row["delta_meas"]) ** 2 <= rhs and row["d_lower"] ** 2 <= rhs
    duh = row["trace_dist"] <= row["rhs_duhamel"] + DUHAMEL_SLACK
    branch = min(math.sqrt(rhs), row["rhs_duhamel"])
    cor = row["d_lower"] <= row["rhs_cor2"] and branch <= row["rhs_cor2"]
    return {"pass_thm1": bool(thm1), "pass_duhamel": bool(duh), "pass_cor2": bool(cor)}


def is_guard_row(row: dict) -> bool:
    return any(f in GUARD_FLAGS for f in str(row.get("guard_flags", "")).split(";") if f)


def _cell_task(args):
    return compute_cell(*args)


def run_sweep(cfg: ScenarioConfig, workers: int = 1) -> list[dict]:
    cfg.check_guards()
    keys = [(ih, ie, it) for ih in range(len(cfg.hbar)) for ie in range(len(cfg.eps))
            for it in range(len(cfg.t))]
    tasks = [(cfg, *k) for k in keys]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_cell_task, tasks))
    else:
        rows = [_cell_task(a) for a in tasks]
    order = sorted(range(len(rows)), key=lambda i: (rows[i]["hbar"], rows[i]["eps"], rows[i]["t"]))
    return [rows[i] for i in order]


def run_header(cfg: ScenarioConfig) -> str:
    lines = ["# scenario configuration", dumps(cfg).rstrip(), "# constants per hbar"]
    for h in cfg.hbar:
        try:
            k = constants(cfg, h, initial_state(cfg, h))
        except GuardError as exc:
            lines.append(f"hbar={h!r}: guard {exc.flag}: {exc}")
            continue
        lines.append(
            f"hbar={h!r} Lambda={k.rate!r} |U|={k.norm_u!r} |grad U|={k.grad_u!r} |V|={k.norm_v!r} "
            f"Lip(grad V)={k.lip_grad_v!r} E0={k.e0!r} E_full={k.e_full!r} Delta_in={k.delta_in!r} "
            f"D'={k.dprime!r} C_d={k.cd!r}"
        )
    return "\n".join(lines) + "\n"


def write_sweep(cfg: ScenarioConfig, rows, out) -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{cfg.scenario}_sweep.csv"
    report.write_csv(rows, path)
    (out / f"{cfg.scenario}_header.txt").write_text(run_header(cfg))
    return path


# --- verdicts ------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Verdict:
    name: str
    checks: list[Check] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)
    files: list[Path] = field(default_factory=list)
    guard_trips: int = 0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def exit_code(self) -> int:
        if self.guard_trips:
            return 2
        return 0 if self.passed else 1

    def summary(self) -> str:
        lines = [f"[{self.name}]"]
        for c in self.checks:
            lines.append(f"  {'PASS' if c.passed else 'FAIL'}  {c.name}  {c.detail}")
        if self.guard_trips:
            lines.append(f"  GUARD  {self.guard_trips} cell(s) aborted by numerical guards")
        return "\n".join(lines)


def loglog_slope(x, y) -> float:
    x, y = np.asarray(x, float), np.asarray(y, float)
    ok = (x > 0) & (y > 0)
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0])


def _ok_rows(rows):
    return [r for r in rows if not is_guard_row(r)]


def verify_theorem1(cfg: ScenarioConfig, out=None, workers: int = 1) -> Verdict:
    rows = run_sweep(cfg, workers)
    v = Verdict("theorem1", rows=rows, guard_trips=len(rows) - len(_ok_rows(rows)))
    good = _ok_rows(rows)
    bad = [r for r in good if not r["pass_thm1"]]
    v.checks.append(Check("(2^d delta)^2 and d_lower^2 <= C eps + D hbar", not bad,
                          f"{len(good) - len(bad)}/{len(good)} cells"))
    bad = [r for r in good if not r["pass_duhamel"]]
    v.checks.append(Check("trace distance <= 2 t eps |U| / hbar + 1e-6", not bad,
                          f"{len(good) - len(bad)}/{len(good)} cells"))
    h = min(cfg.hbar)
    for t in cfg.t:
        sel = [r for r in good if r["hbar"] == h and r["t"] == t and r["eps"] > 0]
        s = loglog_slope([r["eps"] for r in sel], [r["delta_meas"] for r in sel])
        v.checks.append(Check(f"eps-slope of delta at hbar={h:g}, t={t:g} <= {EPS_SLOPE_MAX}",
                              bool(s <= EPS_SLOPE_MAX), f"slope={s:.4f}"))
    if out is not None:
        v.files.append(write_sweep(cfg, rows, out))
        v.files += _plot_theorem1(cfg, good, Path(out))
    return v


def _plot_theorem1(cfg, rows, out: Path) -> list[Path]:
    files = []
    h = min(cfg.hbar)
    series = []
    for t in cfg.t:
        sel = sorted((r for r in rows if r["hbar"] == h and r["t"] == t), key=lambda r: r["eps"])
        e = [r["eps"] for r in sel]
        series.append((f"(2 delta)^2 t={t:g}", e, [(2 * r["delta_meas"]) ** 2 for r in sel], False))
        series.append((f"d_lower^2 t={t:g}", e, [r["d_lower"] ** 2 for r in sel], False))
        series.append((f"C eps + D hbar t={t:g}", e, [r["rhs_thm1"] for r in sel], True))
    p = out / f"{cfg.scenario}_thm1_vs_eps.svg"
    report.svg_loglog(series, p, f"measured vs bound, hbar={h:g}", "eps", "squared distance")
    files.append(p)
    e = max(cfg.eps)
    series = []
    for t in cfg.t:
        sel = sorted((r for r in rows if r["eps"] == e and r["t"] == t), key=lambda r: r["hbar"])
        hs = [r["hbar"] for r in sel]
        series.append((f"(2 delta)^2 t={t:g}", hs, [(2 * r["delta_meas"]) ** 2 for r in sel], False))
        series.append((f"trace dist t={t:g}", hs, [r["trace_dist"] for r in sel], False))
        series.append((f"C eps + D hbar t={t:g}", hs, [r["rhs_thm1"] for r in sel], True))
    p = out / f"{cfg.scenario}_thm1_vs_hbar.svg"
    report.svg_loglog(series, p, f"measured vs bound, eps={e:g}", "hbar", "squared distance")
    files.append(p)
    return files


def verify_corollary2(cfg: ScenarioConfig, out=None, workers: int = 1) -> Verdict:
    rows = run_sweep(cfg, workers)
    v = Verdict("corollary2", rows=rows, guard_trips=len(rows) - len(_ok_rows(rows)))
    good = _ok_rows(rows)
    fails = [r for r in good if not r["pass_cor2"]]
    detail = ", ".join(f"(hbar={r['hbar']:g}, eps={r['eps']:g}, t={r['t']:g})" for r in fails[:6])
    v.checks.append(Check(
        f"min(sqrt(C eps + D hbar), 2 t eps |U| / hbar) <= E(t) eps^(1/3) [{cfg.cor2_envelope} envelope]",
        not fails, f"{len(good) - len(fails)}/{len(good)} cells" + (f"; failing {detail}" if fails else "")))
    if out is not None:
        out = Path(out)
        v.files.append(write_sweep(cfg, rows, out))
        cols = ("hbar", "eps", "t", "branch_thm1", "branch_duhamel", "E_t", "rhs_cor2", "d_lower", "pass_cor2")
        p = out / f"{cfg.scenario}_cor2.csv"
        report.write_csv(good, p, cols)
        v.files.append(p)
        for h in cfg.hbar:
            series = []
            for t in cfg.t:
                sel = sorted((r for r in good if r["hbar"] == h and r["t"] == t), key=lambda r: r["eps"])
                e = [r["eps"] for r in sel]
                series.append((f"sqrt(C eps+D hbar) t={t:g}", e, [r["branch_thm1"] for r in sel], False))
                series.append((f"2t eps|U|/hbar t={t:g}", e, [r["branch_duhamel"] for r in sel], False))
                series.append((f"E eps^1/3 t={t:g}", e, [r["rhs_cor2"] for r in sel], True))
            p = out / f"{cfg.scenario}_cor2_hbar{h:g}.svg"
            report.svg_loglog(series, p, f"interpolation branches, hbar={h:g}", "eps", "distance bound")
            v.files.append(p)
    return v


def verify_coherent_distance(cfg: ScenarioConfig, out=None) -> Verdict:
    """Sandwich bounds on d(psi_z1, psi_z2) for coherent pairs along the q axis."""
    v = Verdict("coherent_distance")
    d = cfg.d
    cd = B.cd_constant(d)[0]
    for h in cfg.hbar:
        base = metrics.standard_dictionary(h, box=cfg.dict_box, step=cfg.dict_step) \
            if cfg.dictionary == "standard" else metrics.TestDictionary([])
        for sep in cfg.coherent_seps:
            z1, z2 = (-sep / 2, 0.0), (sep / 2, 0.0)
            try:
                a = quantum.coherent_state(cfg.grid, h, z1[0], z1[1])
                b = quantum.coherent_state(cfg.grid, h, z2[0], z2[1])
                dic = metrics.pair_dictionary(z1, z2, h, duals=True) + base
                dl = metrics.weak_d_lower(a, b, dic)
                dm = metrics.weak_delta(phasespace.wigner(a), phasespace.wigner(b), dic)
            except GuardError as exc:
                v.guard_trips += 1
                log.warning("coherent pair hbar=%g sep=%g: %s", h, sep, exc)
                continue
            mk = metrics.mk_coherent_upper(z1, z2, h, d)
            row = {"hbar": h, "sep": sep, "d_lower": dl, "two_d_lower": 2**d * dl,
                   "upper": B.sandwich_upper(z1, z2, h, d), "delta_meas": dm, "mk_upper": mk,
                   "chain_upper": 2**d * (mk + cd * h)}
            row["upper_ok"] = row["two_d_lower"] <= row["upper"]
            row["chain_ok"] = dl <= 2**d * dm * (1 + 1e-9) and 2**d * dm <= row["chain_upper"]
            v.rows.append(row)
    v.checks.append(Check("2^d d_lower <= 2^d sqrt(|dz|^2 + 2 d hbar) + C_d hbar",
                          all(r["upper_ok"] for r in v.rows), f"{sum(r['upper_ok'] for r in v.rows)}/{len(v.rows)}"))
    v.checks.append(Check("d_lower <= 2^d delta <= 2^d (MK upper + C_d hbar)",
                          all(r["chain_ok"] for r in v.rows), f"{sum(r['chain_ok'] for r in v.rows)}/{len(v.rows)}"))
    for h in cfg.hbar:
        sel = [r for r in v.rows if r["hbar"] == h]
        if len(sel) < 2:
            continue
        slope = float(np.polyfit([r["sep"] for r in sel], [r["two_d_lower"] for r in sel], 1)[0])
        for r in sel:
            r["slope"] = slope
        v.checks.append(Check(f"least-squares slope of 2^d d_lower vs |dz| at hbar={h:g} >= {COHERENT_SLOPE_MIN}",
                              slope >= COHERENT_SLOPE_MIN, f"slope={slope:.4f}"))
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        cols = ("hbar", "sep", "d_lower", "two_d_lower", "upper", "delta_meas", "mk_upper", "chain_upper",
                "upper_ok", "chain_ok")
        p = out / f"{cfg.scenario}_sandwich.csv"
        report.write_csv(v.rows, p, cols)
        v.files.append(p)
        series = []
        for h in cfg.hbar:
            sel = [r for r in v.rows if r["hbar"] == h]
            series.append((f"2 d_lower hbar={h:g}", [r["sep"] for r in sel], [r["two_d_lower"] for r in sel], False))
            series.append((f"upper hbar={h:g}", [r["sep"] for r in sel], [r["upper"] for r in sel], True))
        p = out / f"{cfg.scenario}_sandwich.svg"
        report.svg_loglog(series, p, "coherent-pair sandwich", "|z1 - z2|", "2^d d")
        v.files.append(p)
    return v


def verify_classical_limit(cfg: ScenarioConfig, out=None) -> Verdict:
    """Squared W2 between Husimi samples and the classical push-forward against its Gronwall budget."""
    v = Verdict("classical_limit")
    cfg.check_guards()
    for ih, h in enumerate(cfg.hbar):
        psi_in = initial_state(cfg, h)
        k = constants(cfg, h, psi_in)
        for ie, e in enumerate(cfg.eps):
            for it, t in enumerate(cfg.t):
                try:
                    psi_t = quantum.propagate(psi_in, hamiltonian(cfg, e), t, cfg.dt)
                    w2, noise, w2_ent = classical_w2(cfg, psi_in, psi_t, t, cell_seed(cfg, ih, ie, it),
                                                     resamples=cfg.ot_resamples, entropic=True)
                except GuardError as exc:
                    v.guard_trips += 1
                    log.warning("classical limit hbar=%g eps=%g t=%g: %s", h, e, t, exc)
                    continue
                tol = OT_TOL_FACTOR * noise
                rhs = B.classical_limit_rhs(t, e, k, tol)
                v.rows.append({"hbar": h, "eps": e, "t": t, "w2": w2, "w2_sinkhorn": w2_ent,
                               "w2_sq": w2 * w2, "tol_ot": tol,
                               "rhs": rhs, "pass": w2 * w2 <= rhs})
    v.checks.append(Check("W2^2 <= exp(t Lambda) 2 Delta^2 + gamma eps + 2 d hbar + tol_OT",
                          all(r["pass"] for r in v.rows), f"{sum(r['pass'] for r in v.rows)}/{len(v.rows)}"))
    e = cfg.classical_monotone_eps
    for t in cfg.t:
        sel = sorted((r for r in v.rows if r["eps"] == e and r["t"] == t), key=lambda r: -r["hbar"])
        if len(sel) >= 2:
            w = [r["w2"] for r in sel]
            mono = all(b < a for a, b in zip(w, w[1:]))
            v.checks.append(Check(f"W2 decreases as hbar decreases (eps={e:g}, t={t:g})", mono,
                                  " > ".join(f"{x:.4f}" for x in w)))
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        p = out / f"{cfg.scenario}_w2.csv"
        report.write_csv(v.rows, p, ("hbar", "eps", "t", "w2", "w2_sinkhorn", "w2_sq", "tol_ot", "rhs", "pass"))
        v.files.append(p)
        series = []
        for ee in cfg.eps:
            for t in cfg.t:
                sel = sorted((r for r in v.rows if r["eps"] == ee and r["t"] == t), key=lambda r: r["hbar"])
                hs = [r["hbar"] for r in sel]
                series.append((f"W2^2 eps={ee:g} t={t:g}", hs, [r["w2_sq"] for r in sel], False))
                series.append((f"budget eps={ee:g} t={t:g}", hs, [r["rhs"] for r in sel], True))
        p = out / f"{cfg.scenario}_w2.svg"
        report.svg_loglog(series, p, "Husimi vs classical push-forward", "hbar", "W2^2")
        v.files.append(p)
    return v


# --- single runs -----------------------------------------------------------------------

def simulate(cfg: ScenarioConfig, out=None, use_oracle: bool = False) -> list[dict]:
    """Propagate the initial state for every (hbar, eps, t) and report moments and invariants."""
    rows = []
    for h in cfg.hbar:
        psi_in = initial_state(cfg, h)
        for e in cfg.eps:
            H = hamiltonian(cfg, e)
            for t in cfg.t:
                psi = quantum.propagate(psi_in, H, t, cfg.dt)
                m = quantum.moments(psi)
                row = {"hbar": h, "eps": e, "t": t, "mean_x": float(m["mean_x"][0]),
                       "mean_p": float(m["mean_p"][0]), "var_x": float(m["var_x"][0]),
                       "var_p": float(m["var_p"][0]), "norm": psi.norm(),
                       "energy": quantum.energy(psi, cfg.lam, cfg.mu, cfg.V, e, cfg.U),
                       "fidelity_oracle": float("nan")}
                if use_oracle and cfg.d == 1 and cfg.N <= quantum.DENSE_CAP:
                    ref = oracle.propagate_dense(psi_in, H, t)
                    row["fidelity_oracle"] = abs(quantum.inner(ref, psi)) ** 2
                rows.append(row)
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        report.write_csv(rows, out / f"{cfg.scenario}_simulate.csv", tuple(rows[0]))
    return rows


def wigner_export(cfg: ScenarioConfig, out, use_oracle: bool = False) -> dict:
    """Wigner and Husimi fields of the perturbed state at the first (hbar, eps) and last t."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    h, e, t = cfg.hbar[0], cfg.eps[0], cfg.t[-1]
    psi = quantum.propagate(initial_state(cfg, h), hamiltonian(cfg, e), t, cfg.dt)
    W, Hs = phasespace.wigner(psi), phasespace.husimi(psi)
    for name, f in (("wigner", W), ("husimi", Hs)):
        report.write_field_csv(f, out / f"{cfg.scenario}_{name}.csv")
        report.svg_heatmap(f, out / f"{cfg.scenario}_{name}.svg", f"{name} hbar={h:g} eps={e:g} t={t:g}")
    info = {"mass_wigner": W.mass(), "mass_husimi": Hs.mass(), "min_wigner": float(W.values.min())}
    if use_oracle:
        info["oracle_sup_diff"] = float(np.abs(oracle.direct_wigner(psi).values - W.values).max())
    return info


# --- oracle self-test ------------------------------------------------------------------

def selftest_oracles(seed: int = 0) -> list[Check]:
    """Pair each fast path with its brute-force oracle at small sizes."""
    from .lattice import SpatialGrid

    rng = np.random.default_rng(seed)
    checks = []
    g = SpatialGrid(1, 6.0, 128)
    H = quantum.HamiltonianSpec(1.0, 0.5, 0.1, potentials.PotentialSpec("cos", {"a": 1.0, "omega": 1.0}),
                                potentials.PotentialSpec("abs_sin", {"a": 0.7, "omega": 1.0}))
    psi = quantum.coherent_state(g, 0.1, 1.0, 0.0)
    fid = abs(quantum.inner(oracle.propagate_dense(psi, H, 1.0), quantum.propagate(psi, H, 1.0, 1e-3))) ** 2
    checks.append(Check("split-step vs dense propagator fidelity >= 1 - 1e-6", fid >= 1 - 1e-6, f"{fid:.12f}"))
    lo = oracle.dense_spectrum(quantum.HamiltonianSpec(), g, 0.1)[0]
    checks.append(Check("harmonic ground energy = hbar/2 to 1e-6", abs(lo - 0.05) < 1e-6, f"{lo:.10f}"))
    gw = SpatialGrid(1, 10.0, 256)
    cat = quantum.WaveFunction(gw, 0.1, quantum.coherent_state(gw, 0.1, -1.0, 0.5).psi
                               + quantum.coherent_state(gw, 0.1, 1.5, -0.3).psi).normalized()
    W = phasespace.wigner(cat)
    dw = float(np.abs(oracle.direct_wigner(cat).values - W.values).max())
    checks.append(Check("wigner vs direct quadrature sup diff < 1e-8", dw < 1e-8, f"{dw:.2e}"))
    dh = float(np.abs(oracle.smooth_wigner(W).values - phasespace.husimi(cat).values).max())
    checks.append(Check("husimi vs Gaussian-smoothed wigner < 1e-6", dh < 1e-6, f"{dh:.2e}"))
    # the 8th-order stencil needs k dx well below 1, hence the finer grid
    gf = SpatialGrid(1, 10.0, 1024)
    catf = quantum.WaveFunction(gf, 0.1, quantum.coherent_state(gf, 0.1, -1.0, 0.5).psi
                                + quantum.coherent_state(gf, 0.1, 1.5, -0.3).psi).normalized()
    dv = abs(quantum.moments(catf)["var_p"][0] - oracle.fd_momentum_variance(catf))
    checks.append(Check("spectral vs finite-difference Var(p) < 1e-6", dv < 1e-6, f"{dv:.2e}"))
    worst = 0.0
    for _ in range(20):
        n, m = rng.integers(2, 9, size=2)
        x, y = rng.normal(size=(n, 2)), rng.normal(size=(m, 2))
        a, b = rng.random(n) + 0.1, rng.random(m) + 0.1
        a, b = a / a.sum(), b / b.sum()
        a[-1] = 1.0 - a[:-1].sum()
        b[-1] = 1.0 - b[:-1].sum()
        fast = metrics.w2_exact(metrics.DiscreteMeasure(x, a), metrics.DiscreteMeasure(y, b))
        worst = max(worst, abs(fast - oracle.exact_ot_small(x, a, y, b)))
    checks.append(Check("exact OT vs transportation simplex < 1e-9", worst < 1e-9, f"{worst:.2e}"))
    x, y = rng.random((50, 2)), rng.random((50, 2))
    mu, nu = metrics.DiscreteMeasure.uniform(x), metrics.DiscreteMeasure.uniform(y)
    ex = metrics.w2_exact(mu, nu)
    sk = metrics.w2_sinkhorn(mu, nu, reg=1e-3).value
    checks.append(Check("sinkhorn vs exact OT within 3%", abs(sk - ex) <= 0.03 * ex, f"{sk:.6f} vs {ex:.6f}"))
    gs = SpatialGrid(1, 4.0, 128)
    a, b = quantum.coherent_state(gs, 0.1, -0.25, 0.0), quantum.coherent_state(gs, 0.1, 0.25, 0.0)
    dic = metrics.pair_dictionary((-0.25, 0.0), (0.25, 0.0), 0.1, widths=(0.5, 1.0))
    dd = abs(metrics.weak_d_lower(a, b, dic) - metrics.weak_d_lower(a, b, dic, method="toeplitz"))
    checks.append(Check("d_lower Husimi route vs Toeplitz matrices < 1e-8", dd < 1e-8, f"{dd:.2e}"))
    q, p = classical.flow(1.0, 0.0, potentials.PotentialSpec("zero"), (1.0, 0.0), math.pi / 2, 1e-4)
    err = float(np.hypot(q[0] - 0.0, p[0] + 1.0))
    checks.append(Check("Verlet harmonic quarter turn vs closed form < 1e-6", err < 1e-6, f"{err:.2e}"))
    return checks
