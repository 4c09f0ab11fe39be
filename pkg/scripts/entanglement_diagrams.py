#!/usr/bin/env python3
"""Entanglement phase diagrams of the four-dot two-orbital Hubbard chain.

Produces E(rho_i) and E(rho_1j) over a (U, eps_1) grid for the four
published parameter sets (N = 4, 6) x (alpha = 0.2, 0.7).  Default grids
are coarse; raise --nu/--neps for production figures.
"""

import argparse
import sys

from qdchain import ehm
from qdchain import io as qio


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-prefix", default="out/ehm")
    ap.add_argument("--nu", type=int, default=17)
    ap.add_argument("--neps", type=int, default=25)
    ap.add_argument("--umax", type=float, default=40.0)
    ap.add_argument("--epsmax", type=float, default=30.0)
    args = ap.parse_args()

    us = [args.umax * k / (args.nu - 1) for k in range(args.nu)]
    eps = [-args.epsmax + 2 * args.epsmax * k / (args.neps - 1)
           for k in range(args.neps)]
    observables = ["E1", "E2", "E3", "E4", "E12", "E13", "E14"]
    for n_el in (4, 6):
        for alpha in (0.2, 0.7):
            rows = ehm.entanglement_diagram(4, n_el, alpha, us, eps, observables)
            path = f"{args.out_prefix}_N{n_el}_a{alpha}.csv"
            qio.emit(qio.Table.of(["U", "epsilon1", "observable", "value"],
                                  rows), "csv", path)
            print("wrote", path, f"({len(rows)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
