#!/usr/bin/env python3
"""Plot a monitored time series emitted by `nnls simulate` or an experiment.

Usage: plot_timeseries.py timeseries.csv [out.png]
"""
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1]
out = sys.argv[2] if len(sys.argv) > 2 else None

rows, trailer = [], {}
with open(path) as fh:
    for line in fh:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            trailer[key.strip()] = value.strip()
        elif not line.startswith("t,"):
            rows.append([float(v) for v in line.split(",")])

t = [r[0] for r in rows]
fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
ax1.semilogy(t, [r[1] for r in rows], label="sup |u|")
if "blowup_estimate" in trailer:
    ax1.axvline(float(trailer["blowup_estimate"]), ls="--", c="r",
                label=f"estimated T = {float(trailer['blowup_estimate']):.4f}")
ax1.legend()
ax1.set_ylabel("sup-norm")
q0, e0 = rows[0][2], rows[0][4]
ax2.plot(t, [abs(r[2] - q0) for r in rows], label="|Re Q - Q(0)|")
ax2.plot(t, [abs(r[4] - e0) for r in rows], label="|Re E - E(0)|")
ax2.set_yscale("log")
ax2.set_xlabel("t")
ax2.set_ylabel("invariant drift")
ax2.legend()
fig.suptitle(f"termination: {trailer.get('termination', '?')}")
fig.tight_layout()
if out:
    fig.savefig(out, dpi=150)
else:
    plt.show()
