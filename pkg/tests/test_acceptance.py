"""End-to-end acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line that is repeated in the terminal
summary.  Criteria that the implementation does not meet fail here rather
than being relaxed; README.md explains why.  Deselect with
``-m "not acceptance"`` for a quick run.
"""
import math
from pathlib import Path

import numpy as np
import pytest

from semiclab import classical, config, harness, metrics, oracle, phasespace as ps, quantum
from semiclab.lattice import SpatialGrid
from semiclab.metrics import DiscreteMeasure
from semiclab.potentials import PotentialSpec

pytestmark = pytest.mark.acceptance

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
REFERENCE = config.load(CONFIGS / "reference.cfg")


@pytest.fixture(scope="module")
def reference_rows():
    return harness.run_sweep(REFERENCE)


def test_1_transform_identities(record):
    g = SpatialGrid(1, 10.0, 512)
    worst_closed = worst_marg = 0.0
    for h in (0.05, 0.1, 0.2):
        for q, p in ((0.0, 0.0), (1.0, 0.5), (-2.0, -0.4)):
            W = ps.wigner(quantum.coherent_state(g, h, q, p))
            exact = ps.coherent_wigner(W.x, W.xi, h, q, p)
            worst_closed = max(worst_closed, float(np.abs(W.values - exact).max()))
        z1, z2 = quantum.coherent_state(g, h, -1.0, 0.5), quantum.coherent_state(g, h, 1.5, -0.3)
        cat = quantum.WaveFunction(g, h, z1.psi + z2.psi).normalized()
        W = ps.wigner(cat)
        dxi = W.xi[1] - W.xi[0]
        mx = W.values.sum(axis=1) * dxi
        worst_marg = max(worst_marg, float(np.abs(mx - np.abs(cat.psi) ** 2).max()))
        # momentum density at the xi nodes by direct quadrature, on the 2 pi hbar scale
        phat = oracle.direct_fourier(cat, W.xi)
        mp = W.values.sum(axis=0) * g.dx
        worst_marg = max(worst_marg, float(np.abs(mp - np.abs(phat) ** 2).max()))
    ok = worst_closed < 1e-6 and worst_marg < 1e-8
    record(1, ok, f"coherent Wigner sup err {worst_closed:.2e} (<1e-6), marginals {worst_marg:.2e} (<1e-8)")
    assert ok


def test_2_toeplitz_calculus(record):
    hb = 0.1
    g = SpatialGrid(1, 4.0, 128)
    x, xi = g.x, ps.xi_nodes(g, hb)
    q0, p0, s = 0.3, -0.2, 0.4
    a, b = np.exp(-((x - q0) ** 2) / (2 * s * s)), np.exp(-((xi - p0) ** 2) / (2 * s * s))
    F = ps.toeplitz_quantize(np.outer(a, b), g, hb)
    tr = abs(np.trace(F).real - 2 * math.pi * s * s)
    P, X = ps.momentum_operator(g, hb), ps.position_operator(g)
    cp = np.linalg.norm((F @ P - P @ F) / (1j * hb)
                        - ps.toeplitz_quantize(np.outer(-(x - q0) / s**2 * a, b), g, hb), 2)
    cx = np.linalg.norm((F @ X - X @ F) / (1j * hb)
                        + ps.toeplitz_quantize(np.outer(a, -(xi - p0) / s**2 * b), g, hb), 2)
    ok = tr < 1e-6 and cp < 1e-4 and cx < 1e-4
    record(2, ok, f"trace err {tr:.2e} (<1e-6), [F,P] err {cp:.2e}, [F,x] err {cx:.2e} (<1e-4)")
    assert ok


def test_3_propagator(record):
    g = SpatialGrid(1, 6.0, 128)
    psi = quantum.coherent_state(g, 0.1, 1.0, 0.0)
    cases = {
        "harmonic": quantum.HamiltonianSpec(1.0),
        "harmonic+cos+eps abs_sin": quantum.HamiltonianSpec(
            1.0, 1.0, 0.1, PotentialSpec("cos", {"a": 1.0, "omega": 1.0}),
            PotentialSpec("abs_sin", {"a": 0.7, "omega": 1.0})),
    }
    ok, parts = True, []
    for name, H in cases.items():
        ref = oracle.propagate_dense(psi, H, 1.0)
        fid = abs(quantum.inner(ref, quantum.propagate(psi, H, 1.0, 1e-3))) ** 2
        err = [np.linalg.norm(quantum.propagate(psi, H, 1.0, dt).psi - ref.psi) * math.sqrt(g.dx)
               for dt in (1e-2, 5e-3)]
        ratio = err[0] / err[1]
        ok &= fid >= 1 - 1e-6 and 3.5 <= ratio <= 4.5
        parts.append(f"{name}: 1-fid {1 - fid:.1e}, ratio {ratio:.3f}")
    record(3, ok, "; ".join(parts))
    assert ok


def test_4_duhamel(record, reference_rows):
    good = [r for r in reference_rows if not harness.is_guard_row(r)]
    n = sum(r["trace_dist"] <= r["rhs_duhamel"] + 1e-6 for r in good)
    ok = len(good) == 27 and n == 27
    record(4, ok, f"trace distance <= 2 t eps |U|/hbar + 1e-6 on {n}/{len(reference_rows)} cells")
    assert ok


def test_5_theorem1(record, reference_rows):
    good = [r for r in reference_rows if not harness.is_guard_row(r)]
    n = sum(r["pass_thm1"] for r in good)
    slopes = {}
    for t in REFERENCE.t:
        sel = [r for r in good if r["hbar"] == 0.05 and r["t"] == t and r["eps"] > 0]
        slopes[t] = harness.loglog_slope([r["eps"] for r in sel], [r["delta_meas"] for r in sel])
    ok_ineq = len(good) == 27 and n == 27
    ok_slope = all(s <= 0.6 for s in slopes.values())
    record(5, ok_ineq and ok_slope,
           f"inequalities on {n}/27 cells; eps-slope of delta at hbar=0.05 "
           + ", ".join(f"t={t:g}: {s:.3f}" for t, s in slopes.items()) + " (limit 0.6)")
    assert ok_ineq and ok_slope


def test_6_corollary2(record, reference_rows):
    good = [r for r in reference_rows if not harness.is_guard_row(r)]
    fails = [r for r in good if not r["pass_cor2"]]
    worst = max(good, key=lambda r: min(r["branch_thm1"], r["branch_duhamel"]) / r["rhs_cor2"])
    ratio = min(worst["branch_thm1"], worst["branch_duhamel"]) / worst["rhs_cor2"]
    ok = len(good) == 27 and not fails
    record(6, ok, f"min-branch <= E eps^(1/3) on {len(good) - len(fails)}/27 cells; worst ratio {ratio:.3f} "
                  f"at hbar={worst['hbar']:g}, eps={worst['eps']:g}, t={worst['t']:g}")
    assert ok


def test_7_coherent_sandwich(record):
    v = harness.verify_coherent_distance(config.load(CONFIGS / "coherent_pairs.cfg"))
    upper = v.checks[0]
    slopes = [c for c in v.checks if c.name.startswith("least-squares")]
    ok = v.guard_trips == 0 and len(v.rows) == 15 and upper.passed and all(c.passed for c in slopes)
    record(7, ok, f"upper bound {upper.detail}; slopes " + ", ".join(c.detail for c in slopes) + " (need >= 0.1)")
    assert ok


def test_8_classical_limit(record):
    v = harness.verify_classical_limit(config.load(CONFIGS / "classical_limit.cfg"))
    target = [r for r in v.rows if r["hbar"] == 0.05 and r["eps"] in (1e-3, 1e-2) and r["t"] == 1.0]
    bound = len(target) == 2 and all(r["pass"] for r in target)
    mono = [c for c in v.checks if c.name.startswith("W2 decreases")]
    ok = bound and len(mono) == 1 and mono[0].passed and v.guard_trips == 0
    record(8, ok, "hbar=0.05: " + ", ".join(f"W2^2 {r['w2_sq']:.4f} <= {r['rhs']:.4f}" for r in target)
                  + f"; W2 vs hbar 0.2 > 0.1 > 0.05: {mono[0].detail if mono else 'missing'}")
    assert ok


def test_9_ot_integrity(record):
    rng = np.random.default_rng(2024)
    worst_sk = 0.0
    for _ in range(100):
        mu = DiscreteMeasure.uniform(rng.normal(size=(50, 2)))
        nu = DiscreteMeasure.uniform(rng.normal(rng.normal(size=2), rng.uniform(0.5, 2.0), size=(50, 2)))
        ex = metrics.w2_exact(mu, nu)
        worst_sk = max(worst_sk, abs(metrics.w2_sinkhorn(mu, nu).value - ex) / ex)
    worst_lp = 0.0
    for _ in range(40):
        n, m = rng.integers(2, 13, size=2)
        if rng.random() < 0.5:
            m = n = min(n, 8)
            a = b = np.full(n, 1.0 / n)
        else:
            a, b = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(m))
        x, y = rng.normal(size=(n, 2)), rng.normal(size=(m, 2))
        fast = metrics.w2_exact(DiscreteMeasure(x, a), DiscreteMeasure(y, b))
        worst_lp = max(worst_lp, abs(fast - oracle.exact_ot_small(x, a, y, b)))
    g = SpatialGrid(1, 10.0, 512)
    worst_h = 0.0
    for k, (z1, z2) in enumerate((((0.0, 0.0), (1.0, 0.5)), ((-1.0, 0.0), (1.0, 0.0)),
                                  ((0.5, -0.5), (0.5, 1.5)))):
        A = classical.sample_from_field(ps.husimi(quantum.coherent_state(g, 0.1, *z1)), 400, 2 * k)
        B = classical.sample_from_field(ps.husimi(quantum.coherent_state(g, 0.1, *z2)), 400, 2 * k + 1)
        w = metrics.w2_exact(DiscreteMeasure.from_ensemble(A), DiscreteMeasure.from_ensemble(B))
        worst_h = max(worst_h, abs(w - math.dist(z1, z2)))
    ok = worst_sk <= 0.03 and worst_lp <= 1e-9 and worst_h <= 0.05
    record(9, ok, f"sinkhorn rel err {worst_sk:.4f} (<=0.03), LP vs oracle {worst_lp:.1e} (<=1e-9), "
                  f"Husimi Gaussians |W2 - |dz|| {worst_h:.4f} (<=0.05)")
    assert ok


def test_10_determinism(record, reference_rows, tmp_path):
    p1 = harness.write_sweep(REFERENCE, reference_rows, tmp_path / "a")
    p2 = harness.write_sweep(REFERENCE, harness.run_sweep(REFERENCE), tmp_path / "b")
    same = p1.read_bytes() == p2.read_bytes()
    record(10, same, f"two full reference sweeps give {'identical' if same else 'different'} CSV bytes")
    assert same
