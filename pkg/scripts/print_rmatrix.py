#!/usr/bin/env python3
"""Print an R-matrix with its Yang-Baxter and projector checks.

    python3 scripts/print_rmatrix.py gl 2
    python3 scripts/print_rmatrix.py so3
"""
import argparse

from qdeform import qgroups as qg
from qdeform import rmatrix as rm

ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
ap.add_argument("kind", choices=("gl", "so3"))
ap.add_argument("n", type=int, nargs="?", default=2)
args = ap.parse_args()

if args.kind == "gl":
    R = rm.r_gl(args.n)
    labels = [f"{i}{j}" for i in range(1, args.n + 1) for j in range(1, args.n + 1)]
    print(rm.format_rmatrix(R, labels))
    print("YBE nonzero entries:", rm.ybe_residual(R))
    for k, v in rm.projector_identities(R).items():
        print(f"{k}: {v}")
else:
    st = qg.so3_build()
    labels = [a + b for a in qg.VEC for b in qg.VEC]
    print(rm.format_rmatrix(st.Rhat, labels))
    for k, v in qg.so3_checks(st).items():
        print(f"{k}: {v}")
