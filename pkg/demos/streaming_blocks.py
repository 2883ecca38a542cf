"""Feed a signal block by block through the streaming engine and check that
the output equals the offline round trip bit for bit."""

import logging
import numpy as np

from warpframe import Streamer, build_frameset, preset, roundtrip, setup

logging.getLogger("warpframe").setLevel(logging.ERROR)

fs = build_frameset(*setup(preset("gaussian")))
rng = np.random.default_rng(3)
x = rng.uniform(-0.1, 0.1, 2 * int(fs.sr))

st = Streamer(fs)
out = [st.process(x[i:i + 512]) for i in range(0, x.size, 512)]
out.append(st.flush())
y_stream = np.concatenate(out)

y_offline, lat = roundtrip(x, fs)
n = min(y_stream.size, y_offline.size)
print(f"delay {st.delay} samples, offline delay {lat.delay_samples}")
print("bit-identical:", y_stream[:n].tobytes() == y_offline[:n].tobytes())
