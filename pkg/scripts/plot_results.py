#!/usr/bin/env python3
"""Optional renderer for experiment CSVs (not part of the acceptance gate).

Takes CSVs produced by the foult CLI or by the experiment scripts and draws
log-log or semilog plots next to them as PNG files.
"""

import argparse
import csv
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def _load(path):
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return header, body


def plot_csv(path):
    path = pathlib.Path(path)
    header, body = _load(path)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    if header[:3] == ["epsilon", "theta", "gap_mean"]:
        eps = [float(r[0]) for r in body]
        gap = [float(r[2]) for r in body]
        err = [float(r[3]) for r in body]
        ax.errorbar(eps, gap, yerr=[3 * e for e in err], marker="o")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("bandwidth eps")
        ax.set_ylabel("E|ilt_eps - ilt_eps/2|^2")
    elif header[0] in ("h", "separation") and len(header) >= 2:
        x = [float(r[0]) for r in body]
        y = [float(r[1]) for r in body]
        ax.loglog(x, y, marker="o")
        ax.set_xlabel(header[0])
        ax.set_ylabel(header[1])
    elif header[0] == "t":
        ts = [float(r[0]) for r in body]
        for col in range(1, len(header)):
            ax.plot(ts, [float(r[col]) for r in body], lw=0.8)
        ax.set_xlabel("t")
        ax.set_ylabel("X_t")
    else:
        raise SystemExit(f"no plot rule for columns {header}")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    out = path.with_suffix(".png")
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csvs", nargs="+", help="CSV files produced by foult")
    args = parser.parse_args()
    for item in args.csvs:
        plot_csv(item)


if __name__ == "__main__":
    main()
