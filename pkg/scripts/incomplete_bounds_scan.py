#!/usr/bin/env python3
"""Scan subset sizes N and record the bracket around the PPT optimum.

For one resource spectrum, runs N from d+1 up to d*d and tabulates the
completion lower bound, the rescaled certificate upper bound, and, with
--sdp, the solver value that must sit between them.

    python3 scripts/incomplete_bounds_scan.py --dim 3 --seed 4 --sdp
"""

import argparse
import csv
import sys

import numpy as np

from entdist.protocol import incomplete_bounds
from entdist.sdp import SDPProblem, solve_primal_ppt
from entdist.states import (
    ResourceSpectrum,
    build_ensemble,
    random_spectrum,
    weyl_basis,
)


def pick_spectrum(args) -> ResourceSpectrum:
    if args.spectrum == "uniform":
        return ResourceSpectrum.uniform(args.dim)
    if args.spectrum == "product":
        return ResourceSpectrum.product(args.dim)
    if args.spectrum == "random":
        return random_spectrum(args.dim, np.random.default_rng(args.seed))
    probs = [float(x) for x in args.spectrum.split(",")]
    return ResourceSpectrum.from_probabilities(probs)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dim", type=int, default=2)
    parser.add_argument("--spectrum", default="random",
                        help="uniform | product | random | comma list of p_i")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--sdp", action="store_true")
    parser.add_argument("--accuracy", type=float, default=1e-4)
    parser.add_argument("--out", help="CSV path (default stdout)")
    args = parser.parse_args()

    basis = weyl_basis(args.dim)
    spec = pick_spectrum(args)

    fields = ["n_states", "lower_completion", "lower_projector", "upper", "sdp"]
    sink = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.DictWriter(sink, fieldnames=fields)
    writer.writeheader()

    for n in range(args.dim + 1, args.dim * args.dim + 1):
        completion = incomplete_bounds(basis, spec, n)
        projector = incomplete_bounds(basis, spec, n, strategy="projector")
        row = {
            "n_states": n,
            "lower_completion": f"{completion.lower:.12f}",
            "lower_projector": f"{projector.lower:.12f}",
            "upper": f"{completion.upper:.12f}",
            "sdp": "",
        }
        if args.sdp:
            ens = build_ensemble(basis, spec, n)
            result = solve_primal_ppt(
                SDPProblem.from_ensemble(ens, accuracy=args.accuracy)
            )
            row["sdp"] = f"{result.primal_value:.8f}"
        writer.writerow(row)

    if args.out:
        sink.close()
        print(f"scan complete: {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
