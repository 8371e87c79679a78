"""Run the reference sweep and print the perturbation and interpolation verdicts.

    python3 scripts/reference_sweep.py [--config configs/reference.cfg] [--workers 1]
"""
import argparse
from pathlib import Path

from semiclab import config, harness

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=ROOT / "configs" / "reference.cfg")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    cfg = config.load(args.config)
    v = harness.verify_theorem1(cfg, cfg.out, args.workers)
    print(v.summary())
    # the corollary verdict reads the same rows; no second sweep needed
    good = [r for r in v.rows if not harness.is_guard_row(r)]
    n = sum(r["pass_cor2"] for r in good)
    print(f"interpolation bound [{cfg.cor2_envelope} envelope]: {n}/{len(good)} cells")
    for f in v.files:
        print(f"wrote {f}")


if __name__ == "__main__":
    main()
