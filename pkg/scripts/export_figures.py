#!/usr/bin/env python3
"""Write the figure, spectrum, transform and eigenvalue tables into a directory.

    python3 scripts/export_figures.py out/ --q0 1.1
"""
import argparse
import pathlib

from qdeform.cli import Config, export_table

ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
ap.add_argument("outdir", type=pathlib.Path)
ap.add_argument("--q0", type=float, default=1.1)
args = ap.parse_args()
args.outdir.mkdir(parents=True, exist_ok=True)

jobs = [("fig12", "fig12.csv", (-20, 40)), ("spectrum", "spectrum.json", None),
        ("transform", "transform_delta.csv", None), ("eigen_table", "eigen_table.csv", None)]
for kind, name, window in jobs:
    cfg = Config(q0=args.q0, window=window)
    n = export_table(kind, cfg, str(args.outdir / name))
    print(f"{name}: {n} rows")
