"""Quick-look plots of the CSV files written by run_all.sh.

usage: python3 scripts/plot.py [OUT_DIR]
"""
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

out = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "out")


def read(name):
    p = out / f"{name}.csv"
    return pd.read_csv(p) if p.exists() else None


fig, ax = plt.subplots(figsize=(5, 6))
for name, style in [("chain_111", "-"), ("chain_121213", "--")]:
    c = read(name)
    if c is not None:
        ax.plot(c.re_s, c.im_s, style, label=name)
        ax.plot(c.re_s.iloc[[0, -1]], c.im_s.iloc[[0, -1]], "ko", ms=3)
ax.set_xlabel("Re s")
ax.set_ylabel("Im s")
ax.legend()
fig.tight_layout()
fig.savefig(out / "chains.png", dpi=150)

sp = read("spectrum_x121314")
if sp is not None:
    fig, ax = plt.subplots(figsize=(5, 5))
    t = np.linspace(0, 2 * np.pi, 361)
    ax.plot(np.cos(t), np.sin(t), "k:", lw=0.5)
    ax.plot(sp.re_z, sp.im_z, "o", ms=3)
    ax.set_aspect("equal")
    fig.savefig(out / "spectrum.png", dpi=150)

for tag in ["121213", "121314"]:
    h, s = read(f"lengths_{tag}_histogram"), read(f"scan_{tag}")
    if h is None or s is None:
        continue
    fig, (a, b) = plt.subplots(2, 1, figsize=(7, 5))
    a.bar(h.bin_lo, h["count"], width=h.bin_hi - h.bin_lo, align="edge")
    a.set_xlabel("length")
    b.plot(s.base, s.score)
    b.plot(s.base[s.candidate == 1], s.score[s.candidate == 1], "rv")
    b.set_xlabel("base length")
    b.set_ylabel("score")
    fig.tight_layout()
    fig.savefig(out / f"lengths_{tag}.png", dpi=150)
