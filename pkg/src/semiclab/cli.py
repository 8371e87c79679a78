"""Command-line interface.

Exit codes: 0 all checks passed, 1 an inequality check failed,
2 a numerical guard tripped or the configuration is invalid.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness, report
from .config import ScenarioConfig, load
from .errors import ConfigError, GuardError

COMMANDS = ("simulate", "sweep", "verify-theorem1", "verify-corollary2",
            "verify-coherent-distance", "verify-classical-limit", "wigner", "selftest-oracles")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="semiclab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="scenario file (defaults to the reference scenario)")
        p.add_argument("--out", type=Path, help="output directory (overrides the config)")
        p.add_argument("--seed", type=int, help="RNG seed (overrides the config)")
        p.add_argument("--oracle", action="store_true", help="cross-check against brute-force oracles")
        p.add_argument("--workers", type=int, default=1, help="process pool size for sweeps")
        p.add_argument("-v", "--verbose", action="store_true")
    return ap


def _config(args) -> ScenarioConfig:
    cfg = load(args.config) if args.config else ScenarioConfig()
    kw = {}
    if args.out is not None:
        kw["out"] = str(args.out)
    if args.seed is not None:
        kw["seed"] = args.seed
    return cfg.replace(**kw) if kw else cfg


def _print_verdict(v: harness.Verdict) -> int:
    print(v.summary())
    for f in v.files:
        print(f"  wrote {f}")
    return v.exit_code()


def run(args) -> int:
    if args.command == "selftest-oracles":
        checks = harness.selftest_oracles(args.seed or 0)
        rows = [{"check": c.name, "result": c.passed, "detail": c.detail} for c in checks]
        print(report.format_table(rows, ("check", "result", "detail")))
        return 0 if all(c.passed for c in checks) else 1
    cfg = _config(args)
    out = Path(cfg.out)
    if args.command == "simulate":
        rows = harness.simulate(cfg, out, use_oracle=args.oracle)
        cols = tuple(rows[0])
        print(report.format_table(rows, cols))
        return 0
    if args.command == "wigner":
        info = harness.wigner_export(cfg, out, use_oracle=args.oracle)
        for k, v in info.items():
            print(f"{k} = {v!r}")
        return 0
    if args.command == "sweep":
        rows = harness.run_sweep(cfg, args.workers)
        path = harness.write_sweep(cfg, rows, out)
        cols = ("hbar", "eps", "t", "delta_meas", "d_lower", "trace_dist", "rhs_thm1", "rhs_duhamel",
                "pass_thm1", "pass_duhamel", "pass_cor2", "guard_flags")
        print(report.format_table(rows, cols))
        print(f"wrote {path}")
        if any(harness.is_guard_row(r) for r in rows):
            return 2
        ok = all(r["pass_thm1"] and r["pass_duhamel"] and r["pass_cor2"] for r in rows)
        return 0 if ok else 1
    if args.command == "verify-theorem1":
        return _print_verdict(harness.verify_theorem1(cfg, out, args.workers))
    if args.command == "verify-corollary2":
        return _print_verdict(harness.verify_corollary2(cfg, out, args.workers))
    if args.command == "verify-coherent-distance":
        return _print_verdict(harness.verify_coherent_distance(cfg, out))
    if args.command == "verify-classical-limit":
        return _print_verdict(harness.verify_classical_limit(cfg, out))
    raise AssertionError(args.command)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except (ConfigError, GuardError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
