#!/usr/bin/env python3
"""Plot |u| over x from an `nnls exact` tabulation.

Usage: nnls exact --kind one_param --alpha 0.75 --t 1.5 --x-range -20:20:0.01 --out u.csv
       plot_profile.py u.csv [out.png]
"""
import sys

import matplotlib.pyplot as plt

path = sys.argv[1]
out = sys.argv[2] if len(sys.argv) > 2 else None

xs, mags = [], []
with open(path) as fh:
    header = fh.readline().strip().split(",")
    for line in fh:
        vals = [float(v) for v in line.split(",")]
        xs.append(vals[0])
        mags.append(vals[3])

plt.figure(figsize=(7, 4))
plt.plot(xs, mags)
plt.xlabel(header[0])
plt.ylabel("|u|")
plt.tight_layout()
if out:
    plt.savefig(out, dpi=150)
else:
    plt.show()
