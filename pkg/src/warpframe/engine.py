"""Analysis, synthesis and round trip over a precomputed FrameSet.

Band ``q`` frame ``n`` is the stored atom centred on sample ``n * n_q``;
every band's frame 0 is centred on sample 0.  Coefficients are plain inner
products computed with direct loops (no fast convolution).

Every output sample is accumulated in a fixed order (frames in increasing
``n`` inside a band, then bands in increasing ``q``) and every coefficient is
a row reduction that depends only on its own samples, so block-wise streaming
is bit-identical to whole-signal processing.
"""

from __future__ import annotations

import logging
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .framegen import FrameSet

__all__ = [
    "CoefficientStream",
    "LatencyReport",
    "Analyzer",
    "Synthesizer",
    "Streamer",
    "analyze",
    "synthesize",
    "roundtrip",
    "estimate_cost",
    "pr_diagnostic",
    "save_coefficients",
    "load_coefficients",
    "EngineError",
]

log = logging.getLogger(__name__)

COEF_MAGIC = b"WGC1"
# elements per temporary product matrix
_CHUNK = 1 << 21


class EngineError(ValueError):
    pass


@dataclass(eq=False)
class CoefficientStream:
    """Per-band coefficient sequences ``c[n, q]`` for ``q >= 0``.

    ``first[q]`` is the index ``n`` of ``coeffs[q][0]``; frame ``n`` of band
    ``q`` is centred on sample ``n * hops[q]``.
    """

    sr: float
    n_samples: int
    frame_hash: str
    hops: np.ndarray
    first: np.ndarray
    coeffs: list = field(repr=False)
    flops: int = 0

    @property
    def q_sup(self) -> int:
        return len(self.coeffs)

    def counts(self) -> np.ndarray:
        return np.array([c.size for c in self.coeffs])


@dataclass
class LatencyReport:
    delay_samples: int
    band_delays: np.ndarray = field(repr=False)


def _weights(q_sup):
    w = np.full(q_sup, 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    return w


def frame_range(fs: FrameSet, q: int, n_samples: int):
    """First and one-past-last frame index whose support meets ``[0, n_samples)``."""
    e = fs.elements[q]
    h, c, L = e.hop, e.center, e.length
    lo = -((L - 1 - c) // h)
    hi = (n_samples - 1 + c) // h + 1
    return lo, hi


def latency(fs: FrameSet) -> LatencyReport:
    L = fs.lengths
    return LatencyReport(int(L.max()) - 1, L - 1)


def _band_coeffs(seg: np.ndarray, atom_re, atom_im, hop: int, count: int):
    """Inner products of ``count`` frames; ``seg[0]`` is the first frame's first sample."""
    L = atom_re.size
    out = np.empty(count, dtype=np.complex128)
    if count == 0:
        return out
    win = sliding_window_view(seg[: (count - 1) * hop + L], L)[::hop]
    step = max(1, _CHUNK // L)
    for i in range(0, count, step):
        w = win[i:i + step]
        out.real[i:i + step] = (w * atom_re).sum(axis=1)
        out.imag[i:i + step] = -(w * atom_im).sum(axis=1)
    return out


class Analyzer:
    """Block-wise analysis; ``process`` returns the newly completed frames per band."""

    def __init__(self, fs: FrameSet):
        self.fs = fs
        self.pad = fs.max_length
        self._buf = np.zeros(self.pad)
        self._buf_start = -self.pad  # absolute index of _buf[0]
        self.n_in = 0
        self._next = np.array([frame_range(fs, q, 1)[0] for q in range(fs.q_sup)])
        self._first = self._next.copy()
        self._atoms = [(e.samples.real.copy(), e.samples.imag.copy()) for e in fs.elements]
        self.flops = 0
        self._done = False

    def _compute(self, upto_end: int, n_max=None):
        """Frames whose support ends before absolute index ``upto_end``."""
        fs = self.fs
        out = []
        for q, e in enumerate(fs.elements):
            h, c, L = e.hop, e.center, e.length
            n0 = int(self._next[q])
            n1 = (upto_end - L + c) // h + 1
            if n_max is not None:
                n1 = min(n1, n_max[q])
            count = max(0, n1 - n0)
            start = n0 * h - c - self._buf_start
            ar, ai = self._atoms[q]
            out.append(_band_coeffs(self._buf[start:], ar, ai, h, count))
            self.flops += 4 * count * L
            self._next[q] = n0 + count
        keep = min(int(self._next[q]) * e.hop - e.center for q, e in enumerate(fs.elements))
        drop = keep - self._buf_start
        if drop > 0:
            self._buf = self._buf[drop:]
            self._buf_start = keep
        return out

    def process(self, block) -> list:
        if self._done:
            raise EngineError("analyzer already flushed")
        block = np.asarray(block, dtype=float)
        if block.ndim != 1:
            raise EngineError("signal must be one-dimensional")
        self._buf = np.concatenate([self._buf, block])
        self.n_in += block.size
        return self._compute(self.n_in)

    def flush(self) -> list:
        if self.n_in == 0:
            raise EngineError("empty signal")
        fs = self.fs
        n_max = [frame_range(fs, q, self.n_in)[1] for q in range(fs.q_sup)]
        self._buf = np.concatenate([self._buf, np.zeros(self.pad)])
        out = self._compute(self.n_in + self.pad, n_max)
        self._done = True
        return out


def analyze(signal, fs: FrameSet, block_size=None, sr=None) -> CoefficientStream:
    """Coefficients ``c[n, q] = sum_t x[t] conj(atom_q[t - n n_q])`` for ``q >= 0``."""
    x = np.asarray(signal)
    if x.ndim != 1 or x.size == 0:
        raise EngineError("signal must be a non-empty 1-D array")
    if np.iscomplexobj(x):
        raise EngineError("signal must be real")
    if sr is not None and sr != fs.sr:
        raise EngineError(f"sampling rate {sr} does not match frame cache ({fs.sr})")
    an = Analyzer(fs)
    parts = [[] for _ in range(fs.q_sup)]
    step = x.size if block_size is None else int(block_size)
    for i in range(0, x.size, step):
        for q, c in enumerate(an.process(x[i:i + step])):
            parts[q].append(c)
    for q, c in enumerate(an.flush()):
        parts[q].append(c)
    coeffs = [np.concatenate(p) for p in parts]
    return CoefficientStream(fs.sr, int(x.size), fs.hash,
                             np.array([e.hop for e in fs.elements]), an._first.copy(),
                             coeffs, an.flops)


def _render_band(e, coeffs, first, weight, t0, t1):
    """Band contribution on absolute samples ``[t0, t1)``, frames added in increasing n."""
    h, c, L = e.hop, e.center, e.length
    m = -(-L // h)
    seg = np.zeros(m * h, dtype=np.complex128)
    seg[:L] = e.samples
    seg_re = (weight * seg.real).reshape(m, h)
    seg_im = (weight * seg.imag).reshape(m, h)
    s0 = (t0 + c) // h
    s1 = (t1 - 1 + c) // h + 1
    Y = np.zeros((s1 - s0, h))
    last = first + coeffs.size
    for j in range(m - 1, -1, -1):
        # slot s gets frame n = s - j
        a = max(s0, first + j)
        b = min(s1, last + j)
        if a >= b:
            continue
        cr = coeffs.real[a - j - first:b - j - first, None]
        ci = coeffs.imag[a - j - first:b - j - first, None]
        Y[a - s0:b - s0] += cr * seg_re[j] - ci * seg_im[j]
    off = t0 + c - s0 * h
    return Y.reshape(-1)[off:off + (t1 - t0)]


def _render(fs: FrameSet, coeffs, first, t0, t1, weights):
    y = np.zeros(t1 - t0)
    for q, e in enumerate(fs.elements):
        if coeffs[q].size:
            y += _render_band(e, coeffs[q], int(first[q]), weights[q], t0, t1)
    return y


class Synthesizer:
    """Block-wise synthesis.  Output index ``k`` holds the sample at time ``k - delay``."""

    def __init__(self, fs: FrameSet, n_first=None):
        self.fs = fs
        self.delay = latency(fs).delay_samples
        self._w = _weights(fs.q_sup)
        self._first = (np.array([frame_range(fs, q, 1)[0] for q in range(fs.q_sup)])
                       if n_first is None else np.asarray(n_first).copy())
        self._coeffs = [np.zeros(0, dtype=np.complex128) for _ in range(fs.q_sup)]
        self.n_out = 0  # output samples emitted

    def _ready_until(self):
        # the next missing frame of band q starts at (first+count)*h - c
        return min(int(self._first[q] + self._coeffs[q].size) * e.hop - e.center
                   for q, e in enumerate(self.fs.elements))

    def _emit(self, t_end):
        t0 = self.n_out - self.delay
        if t_end <= t0:
            return np.zeros(0)
        y = _render(self.fs, self._coeffs, self._first, t0, t_end, self._w)
        self.n_out += y.size
        self._trim(t_end)
        return y

    def _trim(self, t_end):
        for q, e in enumerate(self.fs.elements):
            # frames ending before t_end are no longer needed
            n_keep = (t_end - e.length + e.center) // e.hop + 1
            drop = int(min(max(0, n_keep - self._first[q]), self._coeffs[q].size))
            if drop:
                self._coeffs[q] = self._coeffs[q][drop:]
                self._first[q] += drop

    def process(self, new_coeffs) -> np.ndarray:
        for q, c in enumerate(new_coeffs):
            if c.size:
                self._coeffs[q] = np.concatenate([self._coeffs[q], c])
        return self._emit(self._ready_until())

    def flush(self, n_samples: int) -> np.ndarray:
        return self._emit(n_samples)


class Streamer:
    """Analysis followed by synthesis, fed block by block."""

    def __init__(self, fs: FrameSet):
        self.analyzer = Analyzer(fs)
        self.synth = Synthesizer(fs)

    @property
    def delay(self) -> int:
        return self.synth.delay

    def process(self, block) -> np.ndarray:
        return self.synth.process(self.analyzer.process(block))

    def flush(self) -> np.ndarray:
        y = self.synth.process(self.analyzer.flush())
        return np.concatenate([y, self.synth.flush(self.analyzer.n_in)])


def synthesize(coeffs: CoefficientStream, fs: FrameSet, aligned: bool = True) -> np.ndarray:
    """Overlap-add ``c0 atom_0 + sum_q 2 Re(c_q atom_q)`` over all frames.

    With ``aligned=True`` the result is time-aligned with the analysed signal
    (length ``n_samples``); otherwise it is delayed by ``latency(fs)`` as a
    causal stream would be, with length ``n_samples + delay``.
    """
    if coeffs.frame_hash != fs.hash:
        raise EngineError("coefficients were computed with a different frame cache")
    delay = latency(fs).delay_samples
    t0 = 0 if aligned else -delay
    return _render(fs, coeffs.coeffs, coeffs.first, t0, coeffs.n_samples,
                   _weights(fs.q_sup))


def roundtrip(signal, fs: FrameSet, block_size=None):
    """Analysis then synthesis as a causal stream.

    Returns the output (length ``len(signal) + delay``) and the latency; the
    input delayed by ``delay_samples`` is the reconstruction target.
    """
    x = np.asarray(signal, dtype=float)
    if block_size is None:
        c = analyze(x, fs)
        return synthesize(c, fs, aligned=False), latency(fs)
    st = Streamer(fs)
    out = [st.process(x[i:i + block_size]) for i in range(0, x.size, block_size)]
    out.append(st.flush())
    return np.concatenate(out), latency(fs)


# -- cost model and diagnostics ---------------------------------------------

def estimate_cost(fs: FrameSet) -> dict:
    """Average and worst-case flop counts and memory figures."""
    L = fs.lengths.astype(float)
    h = np.array([e.hop for e in fs.elements], dtype=float)
    return {
        "N_avg": float(np.sum(4 * L / h)),
        "worst_frame": float(np.sum(4 * L)),
        "max_hop": int(h.max()),
        "min_hop": int(h.min()),
        "lcm_hop": int(math.lcm(*[int(v) for v in h])),
        "sum_Tq": float(L.sum() / fs.sr),
        "max_Tq": float(L.max() / fs.sr),
        "memory_cells": fs.memory_bounds(),
        "buffer_cells": int(L.max()),
    }


def pr_diagnostic(fs: FrameSet, n_grid: int = 8193) -> dict:
    """Diagonal of the analysis-synthesis operator, ``D(f)``, on ``[0, sr/2]``.

    ``D(f) = (1/a) sum_q w_q (|S_q(f)|^2 + |S_q(-f)|^2)`` with ``S_q`` the
    periodised band spectrum ``hhat(theta^-1(f) - q b)`` and ``w_q = 1/2`` for
    the two self-conjugate bands (DC and Nyquist), 1 otherwise.  Hop aliasing
    is not included.
    """
    p, wmap, win = fs.params, fs.wmap, fs.window
    f = np.linspace(0.0, p.sr / 2, n_grid)
    ks = range(-2, 3)
    pos = [wmap.eval_inverse(f + k * p.sr) for k in ks]
    neg = [wmap.eval_inverse(-f + k * p.sr) for k in ks]
    w = _weights(p.q_sup) / 2
    D = np.zeros(n_grid)
    for q in range(p.q_sup):
        sp = sum(win.freq_eval(nu - q * p.b) for nu in pos)
        sn = sum(win.freq_eval(nu - q * p.b) for nu in neg)
        D += w[q] * (sp ** 2 + sn ** 2)
    D /= p.a
    return {
        "f": f,
        "D": D,
        "max_dev": float(np.max(np.abs(D - 1))),
        "bound_ratio": float(D.max() / D.min()),
        "min": float(D.min()),
        "max": float(D.max()),
    }


# -- coefficient file -------------------------------------------------------

def save_coefficients(coeffs: CoefficientStream, path):
    with open(path, "wb") as fh:
        fh.write(COEF_MAGIC)
        fh.write(coeffs.frame_hash.encode("ascii"))
        fh.write(struct.pack("<dIQ", coeffs.sr, coeffs.q_sup, coeffs.n_samples))
        table = np.stack([coeffs.hops, coeffs.first, coeffs.counts()], axis=1).astype("<i8")
        fh.write(table.tobytes())
        for c in coeffs.coeffs:
            fh.write(np.ascontiguousarray(c, dtype="<c16").tobytes())


def load_coefficients(path) -> CoefficientStream:
    data = Path(path).read_bytes()
    if data[:4] != COEF_MAGIC:
        raise EngineError(f"{path}: not a coefficient file (bad magic)")
    frame_hash = data[4:68].decode("ascii")
    sr, q_sup, n = struct.unpack_from("<dIQ", data, 68)
    off = 68 + struct.calcsize("<dIQ")
    table = np.frombuffer(data, dtype="<i8", count=3 * q_sup, offset=off).reshape(q_sup, 3)
    off += table.nbytes
    coeffs = []
    for cnt in table[:, 2]:
        coeffs.append(np.frombuffer(data, dtype="<c16", count=int(cnt), offset=off).astype(np.complex128))
        off += int(cnt) * 16
    if off != len(data):
        raise EngineError(f"{path}: {len(data) - off} trailing bytes")
    return CoefficientStream(sr, int(n), frame_hash, table[:, 0].copy(), table[:, 1].copy(), coeffs)
