"""Time-step convergence of the split-step propagator against the dense exponential.

    python3 scripts/convergence_order.py [--N 128] [--hbar 0.1] [--T 1]
"""
import argparse
import math

import numpy as np

from semiclab import oracle, quantum, report
from semiclab.lattice import SpatialGrid
from semiclab.potentials import PotentialSpec

DTS = (4e-2, 2e-2, 1e-2, 5e-3, 2.5e-3)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=128)
    ap.add_argument("--L", type=float, default=6.0)
    ap.add_argument("--hbar", type=float, default=0.1)
    ap.add_argument("--T", type=float, default=1.0)
    ap.add_argument("--eps", type=float, default=0.1)
    args = ap.parse_args()
    g = SpatialGrid(1, args.L, args.N)
    psi = quantum.coherent_state(g, args.hbar, 1.0, 0.0)
    H = quantum.HamiltonianSpec(1.0, 1.0, args.eps, PotentialSpec("cos", {"a": 1.0, "omega": 1.0}),
                                PotentialSpec("abs_sin", {"a": 0.7, "omega": 1.0}))
    ref = oracle.propagate_dense(psi, H, args.T)
    rows, prev = [], None
    for dt in DTS:
        out = quantum.propagate(psi, H, args.T, dt)
        err = float(np.linalg.norm(out.psi - ref.psi) * math.sqrt(g.dx))
        rows.append({"dt": dt, "l2_error": err, "ratio": prev / err if prev else float("nan"),
                     "infidelity": 1 - abs(quantum.inner(ref, out)) ** 2})
        prev = err
    print(report.format_table(rows, ("dt", "l2_error", "ratio", "infidelity")))


if __name__ == "__main__":
    main()
