"""Husimi samples of the evolved state against the classical push-forward, in W2.

    python3 scripts/classical_limit.py [--config configs/classical_limit.cfg]
"""
import argparse
from pathlib import Path

from semiclab import config, harness, report

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=ROOT / "configs" / "classical_limit.cfg")
    args = ap.parse_args()
    cfg = config.load(args.config)
    v = harness.verify_classical_limit(cfg, cfg.out)
    print(report.format_table(v.rows, ("hbar", "eps", "t", "w2", "w2_sinkhorn", "w2_sq", "tol_ot", "rhs", "pass")))
    print(v.summary())


if __name__ == "__main__":
    main()
