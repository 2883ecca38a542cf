"""Build the Gaussian preset, pass five seconds of white noise through it and
report the reconstruction error, the latency and the cost per sample."""

import logging
import time

from warpframe import (TestSignal, build_frameset, estimate_cost, gen_signal, measure_err,
                       preset, roundtrip, setup)

logging.getLogger("warpframe").setLevel(logging.ERROR)

cfg = preset("gaussian")
t0 = time.perf_counter()
fs = build_frameset(*setup(cfg))
print(f"built {fs.q_sup} bands in {time.perf_counter() - t0:.1f} s")

x = gen_signal(TestSignal("white", 5.0, cfg.sr, seed=1))
t0 = time.perf_counter()
y, lat = roundtrip(x, fs)
wall = time.perf_counter() - t0

err = measure_err(x, y, lat.delay_samples, trim=int(round(cfg.T_max * cfg.sr)))
cost = estimate_cost(fs)
print(f"err            {err:.1f} dB")
print(f"delay          {lat.delay_samples} samples ({lat.delay_samples / cfg.sr * 1000:.0f} ms)")
print(f"flops/sample   {cost['N_avg']:.0f}")
print(f"wall time      {wall:.1f} s for {x.size / cfg.sr:.0f} s of audio")
