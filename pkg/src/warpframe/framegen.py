"""Precomputation of the redressed warped atoms and the frame cache file.

Each atom is built in the frequency domain on an ``N_c``-point DFT grid,

    Phi_q(f) = sqrt(n_q / a) * hhat(theta^-1(f) - q b),

periodised over multiples of the sampling rate, transformed to time with a
zero phase, centred, and truncated to a compact support.  Only bands
``0 <= q < q_sup`` are stored: bands with negative index are the complex
conjugates of the stored ones.
"""

from __future__ import annotations

import hashlib
import io
import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .params import FrameParams
from .warpmap import WarpMap
from .window import PrototypeWindow

__all__ = [
    "FrameElement",
    "FrameSet",
    "band_spectrum",
    "generate_atom",
    "truncate_atom",
    "build_frameset",
    "save_frameset",
    "load_frameset",
    "CacheError",
]

log = logging.getLogger(__name__)

CACHE_MAGIC = b"WGF1"
#: images of the spectrum at f + k*sr included when sampling a band
PERIODS = 2
EDGE_WARN = 1e-4
LOSS_WARN = 1e-4


class CacheError(ValueError):
    pass


@dataclass(eq=False)
class FrameElement:
    """One stored atom; ``samples[center]`` sits at time zero."""

    q: int
    samples: np.ndarray
    center: int
    hop: int
    sr: float
    energy: float
    trunc_loss: float = 0.0
    edge_ratio: float = 0.0

    @property
    def length(self) -> int:
        return self.samples.size

    @property
    def T_q(self) -> float:
        return self.samples.size / self.sr


@dataclass(eq=False)
class FrameSet:
    params: FrameParams
    wmap: WarpMap
    window: PrototypeWindow
    elements: list = field(repr=False)

    def __post_init__(self):
        self._hash = None

    @property
    def q_sup(self) -> int:
        return len(self.elements)

    @property
    def sr(self) -> float:
        return self.params.sr

    @property
    def total_memory(self) -> int:
        return sum(e.samples.nbytes for e in self.elements)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([e.length for e in self.elements])

    @property
    def max_length(self) -> int:
        return int(self.lengths.max())

    def memory_bounds(self) -> dict:
        """Cell counts of the three precomputation layouts (complex cells)."""
        L = self.lengths
        n_c = self.params.N_c
        return {
            "per_band_buffers": 2 * self.q_sup * n_c,
            "shared_buffer": n_c + int(L.sum()),
            "minimal": int(L.sum()),
            "stored": int(L.sum()),
        }

    @property
    def hash(self) -> str:
        if self._hash is None:
            self._hash = hashlib.sha256(_serialize(self)).hexdigest()
        return self._hash


def _nu_images(p: FrameParams, wmap: WarpMap):
    f = np.fft.fftfreq(p.N_c, d=1.0 / p.sr)
    return [wmap.eval_inverse(f + k * p.sr) for k in range(-PERIODS, PERIODS + 1)]


def band_spectrum(q: int, p: FrameParams, window: PrototypeWindow, nu_images) -> np.ndarray:
    """Sampled spectrum of band ``q`` in DFT order (real, zero phase)."""
    shift = q * p.b
    spec = np.zeros(p.N_c)
    for nu in nu_images:
        spec += window.freq_eval(nu - shift)
    spec *= np.sqrt(p.hops[q] / p.a)
    return spec


def generate_atom(q: int, p: FrameParams, wmap: WarpMap, window: PrototypeWindow,
                  nu_images=None) -> FrameElement:
    """Untruncated atom of band ``q`` on the full ``N_c`` buffer, centred."""
    if not 0 <= q < p.q_sup:
        raise IndexError(f"band {q} outside [0, {p.q_sup})")
    if p.N_c < window.T * p.sr:
        raise ValueError("compute buffer shorter than the prototype window")
    if nu_images is None:
        nu_images = _nu_images(p, wmap)
    x = np.fft.fftshift(np.fft.ifft(band_spectrum(q, p, window, nu_images)))
    center = p.N_c // 2
    mag = np.abs(x)
    peak = mag.max()
    edge = max(mag[0], mag[-1]) / peak
    return FrameElement(q=q, samples=x, center=center, hop=int(p.hops[q]), sr=p.sr,
                        energy=float(np.vdot(x, x).real), edge_ratio=float(edge))


def truncate_atom(e: FrameElement, C_cut: float, T_max: float) -> FrameElement:
    """Zero the atom beyond the outermost samples above ``max / C_cut``.

    The support is then clipped to at most ``T_max * sr`` samples around the
    centre, and only the support is kept.
    """
    x = e.samples
    mag = np.abs(x)
    thr = mag.max() / C_cut
    c = e.center
    above = np.flatnonzero(mag >= thr)
    right = above[-1] - c
    left = c - above[0]
    max_half = int((T_max * e.sr - 1) // 2)
    right = min(right, max_half)
    left = min(left, max_half)
    if right < 0 or left < 0:
        raise ValueError(f"band {e.q}: empty support after truncation")
    kept = x[c - left:c + right + 1].copy()
    energy = float(np.vdot(kept, kept).real)
    loss = 1.0 - energy / e.energy if e.energy > 0 else 0.0
    return FrameElement(q=e.q, samples=kept, center=left, hop=e.hop, sr=e.sr,
                        energy=energy, trunc_loss=max(loss, 0.0), edge_ratio=e.edge_ratio)


def build_frameset(p: FrameParams, wmap: WarpMap, window: PrototypeWindow,
                   cache=None) -> FrameSet:
    """Generate and truncate all ``q_sup`` atoms; optionally write the cache."""
    nu_images = _nu_images(p, wmap)
    elements = []
    for q in range(p.q_sup):
        try:
            full = generate_atom(q, p, wmap, window, nu_images)
            elements.append(truncate_atom(full, p.C_cut, p.T_max))
        except ValueError as exc:
            raise ValueError(f"band {q}: {exc}") from exc
    wrapped = [e.q for e in elements if e.edge_ratio > EDGE_WARN]
    if wrapped:
        log.warning("%d band(s) exceed %.0e of their peak at the buffer edge "
                    "(wraparound), lowest q=%d", len(wrapped), EDGE_WARN, wrapped[0])
    lossy = [e.q for e in elements if e.trunc_loss > LOSS_WARN]
    if lossy:
        log.warning("%d band(s) lose more than %.0e of their energy to truncation",
                    len(lossy), LOSS_WARN)
    fs = FrameSet(p, wmap, window, elements)
    if cache is not None:
        save_frameset(fs, cache)
    return fs


# -- cache file -------------------------------------------------------------

def _header(fs: FrameSet) -> dict:
    p = fs.params
    return {
        "params": p.scalars(),
        "centers": p.centers.tolist(),
        "bw": p.bw.tolist(),
        "hops": p.hops.tolist(),
        "map": {k.split(".", 1)[1]: v for k, v in fs.wmap.describe().items()} | {"sr": fs.wmap.sr},
        "window": {
            "kind": fs.window.kind, "T": fs.window.T, "R": fs.window.R, "b": fs.window.b,
            "overlap": fs.window.overlap, "amp": fs.window.amp, "C_gauss": fs.window.C_gauss,
        },
        "elements": [
            {"energy": e.energy, "trunc_loss": e.trunc_loss, "edge_ratio": e.edge_ratio}
            for e in fs.elements
        ],
    }


def _serialize(fs: FrameSet) -> bytes:
    buf = io.BytesIO()
    head = json.dumps(_header(fs), sort_keys=True).encode()
    buf.write(CACHE_MAGIC)
    buf.write(struct.pack("<dI", fs.sr, fs.q_sup))
    buf.write(struct.pack("<Q", len(head)))
    buf.write(head)
    table = np.array([[e.q, e.hop, e.center, e.length] for e in fs.elements], dtype="<i8")
    buf.write(table.tobytes())
    for e in fs.elements:
        buf.write(np.ascontiguousarray(e.samples, dtype="<c16").tobytes())
    return buf.getvalue()


def save_frameset(fs: FrameSet, path) -> str:
    data = _serialize(fs)
    Path(path).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def load_frameset(path) -> FrameSet:
    data = Path(path).read_bytes()
    if data[:4] != CACHE_MAGIC:
        raise CacheError(f"{path}: not a frame cache (bad magic)")
    sr, q_sup = struct.unpack_from("<dI", data, 4)
    (hlen,) = struct.unpack_from("<Q", data, 16)
    off = 24
    head = json.loads(data[off:off + hlen])
    off += hlen
    table = np.frombuffer(data, dtype="<i8", count=4 * q_sup, offset=off).reshape(q_sup, 4)
    off += table.nbytes
    ps = head["params"]
    p = FrameParams(
        sr=ps["sr"], K=ps["K"], R=ps["R"], a=ps["a"], b=ps["b"], BW=ps["BW"],
        q_sup=ps["q_sup"], centers=np.array(head["centers"]), bw=np.array(head["bw"]),
        hops=np.array(head["hops"], dtype=np.int64), C_b=ps["C_b"], C_d=ps["C_d"],
        C_cut=ps["C_cut"], C_Tc=ps["C_Tc"], T=ps["T"], T_c=ps["T_c"], T_max=ps["T_max"],
        N_c=ps["N_c"], theta_inf=ps["theta_inf"], uniform_hop=bool(ps["uniform_hop"]),
    )
    wmap = WarpMap(**head["map"])
    window = PrototypeWindow(**head["window"])
    elements = []
    for (q, hop, center, length), meta in zip(table, head["elements"]):
        samples = np.frombuffer(data, dtype="<c16", count=int(length), offset=off).astype(np.complex128)
        off += int(length) * 16
        elements.append(FrameElement(q=int(q), samples=samples, center=int(center),
                                     hop=int(hop), sr=sr, **meta))
    if off != len(data):
        raise CacheError(f"{path}: {len(data) - off} trailing bytes")
    return FrameSet(p, wmap, window, elements)
