"""Weak distance between coherent pairs against the sandwich bounds.

    python3 scripts/coherent_sandwich.py [--config configs/coherent_pairs.cfg]
"""
import argparse
from pathlib import Path

from semiclab import config, harness, report

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=ROOT / "configs" / "coherent_pairs.cfg")
    args = ap.parse_args()
    cfg = config.load(args.config)
    v = harness.verify_coherent_distance(cfg, cfg.out)
    print(report.format_table(v.rows, ("hbar", "sep", "two_d_lower", "upper", "delta_meas", "chain_upper",
                                        "upper_ok", "chain_ok")))
    print(v.summary())


if __name__ == "__main__":
    main()
