"""Print where the bands sit: centre frequency, bandwidth, hop and the length
the truncated atom keeps.  Low bands are linear-spaced and long, high bands
are octave-spaced and short."""

import logging

import numpy as np

from warpframe import build_frameset, preset, setup

logging.getLogger("warpframe").setLevel(logging.ERROR)

fs = build_frameset(*setup(preset("gaussian")))
p = fs.params
print(f"{'band':>4} {'centre Hz':>10} {'bw Hz':>9} {'hop':>5} {'atom ms':>8}")
for q in np.unique(np.linspace(0, fs.q_sup - 1, 16).astype(int)):
    e = fs.elements[q]
    print(f"{q:4d} {p.centers[q]:10.1f} {p.bw[q]:9.1f} {e.hop:5d} {1000 * e.T_q:8.1f}")
