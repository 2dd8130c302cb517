#!/usr/bin/env python3
"""Bandwidth-halving study of the intersection local time in L^2.

Writes one CSV per (H1, H2, k) configuration with the common-random-number
gap E|ilt_eps - ilt_{eps/2}|^2 along a shrinking bandwidth sweep, covering
both a configuration that satisfies the L^2 existence condition and one that
violates it (the violated run is diagnostic output, not a pass/fail gate).
"""

import argparse
import pathlib
import tempfile

from foult.cli import run
from foult.localtime import existence_condition_value

CASES = [
    # (name, h1, h2, d, k, n_steps)
    ("satisfied_k1", 0.5, 0.5, 1, "1", 512),
    ("satisfied_k0_rough", 0.3, 0.3, 1, "0", 512),
    ("violated_k2_d3", 0.9, 0.9, 3, "2,0,0", 256),
]

CONFIG = """\
grid.t_final = 1.0
grid.n_steps = {n_steps}
model.h = {h1}
model.v = 2.0
model.d = {d}
model2.h = {h2}
model2.v = 2.0
model2.d = {d}
query.t = 1.0
query.k = {k}
mc.n_paths = {n_paths}
mc.seed = {seed}
sweep.epsilon = 0.4,0.2,0.1,0.05
"""


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/convergence", help="output directory")
    parser.add_argument("--paths", type=int, default=500, help="path pairs per bandwidth sweep")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    out_dir = pathlib.Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    for name, h1, h2, d, k, n_steps in CASES:
        k_tuple = tuple(int(v) for v in k.split(","))
        value = existence_condition_value(h1, h2, k_tuple, d)
        print(f"== {name}: condition value {value:.3f} "
              f"({'satisfied' if value <= 1 else 'violated'})")
        cfg = CONFIG.format(h1=h1, h2=h2, d=d, k=k, n_steps=n_steps,
                            n_paths=args.paths, seed=args.seed)
        with tempfile.NamedTemporaryFile("w", suffix=".cfg", delete=False) as fh:
            fh.write(cfg)
            cfg_path = fh.name
        code = run("convergence", cfg_path, out=str(out_dir / name))
        print(f"   exit {code}; wrote {out_dir / name}.csv")


if __name__ == "__main__":
    main()
