"""Test signals, the reconstruction-error metric and the benchmark suites."""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .config import Config, preset
from .engine import roundtrip, estimate_cost, _render, _weights
from .framegen import FrameSet, build_frameset
from .params import setup

__all__ = [
    "TestSignal",
    "ErrorReport",
    "gen_signal",
    "measure_err",
    "run_suite",
    "SUITES",
    "ERR_FLOOR",
    "COLUMNS",
]

log = logging.getLogger(__name__)

ERR_FLOOR = -200.0
RMS_LEVEL = 0.1
COLUMNS = ["signal", "err_dB", "R", "K", "b", "q_sup", "a", "C_b", "C_d", "C_cut",
           "T_max", "N_avg", "wall_ms"]


@dataclass(frozen=True)
class TestSignal:
    """Description of a deterministic test signal.

    ``kind`` is one of ``white``, ``sine``, ``const``, ``clicks``, ``atoms``
    or ``wav``; ``param`` is the sine frequency, the click spacing in
    seconds, the atom density per second or the WAV path.
    """

    __test__ = False  # not a pytest class

    kind: str
    duration: float = 5.0
    sr: float = 44100.0
    seed: int = 0
    param: object = None

    @property
    def label(self) -> str:
        if self.kind == "sine":
            f = float(self.param)
            return f"sine {f / 1000:g}k" if f >= 1000 else f"sine {f:g}"
        if self.kind == "wav":
            return str(self.param)
        return self.kind


def _normalise(x):
    rms = np.sqrt(np.mean(x ** 2))
    return x if rms == 0 else x * (RMS_LEVEL / rms)


def gen_signal(spec: TestSignal, fs: FrameSet | None = None) -> np.ndarray:
    """Render ``spec`` at RMS 0.1 (``atoms`` needs the frame set it samples from)."""
    if spec.kind == "wav":
        from .wavio import read_wav
        x, sr = read_wav(spec.param)
        if sr != spec.sr:
            raise ValueError(f"{spec.param}: sampling rate {sr} != {spec.sr}")
        return _normalise(x)
    if spec.duration <= 0:
        raise ValueError("duration must be positive")
    n = int(round(spec.duration * spec.sr))
    if n == 0:
        raise ValueError("duration shorter than one sample")
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "white":
        x = rng.uniform(-1.0, 1.0, n)
    elif spec.kind == "sine":
        t = np.arange(n) / spec.sr
        x = np.sin(2 * np.pi * float(spec.param) * t)
    elif spec.kind == "const":
        x = np.ones(n)
    elif spec.kind == "clicks":
        spacing = 1.0 if spec.param is None else float(spec.param)
        x = np.zeros(n)
        x[:: int(round(spacing * spec.sr))] = 1.0
    elif spec.kind == "atoms":
        if fs is None:
            raise ValueError("atoms signal needs a frame set")
        x = _sparse_atoms(fs, n, rng, 20.0 if spec.param is None else float(spec.param))
    else:
        raise ValueError(f"unknown signal kind {spec.kind!r}")
    return _normalise(x)


def _sparse_atoms(fs: FrameSet, n, rng, density):
    count = max(1, int(round(density * n / fs.sr)))
    qs = rng.integers(0, fs.q_sup, count)
    coeffs = [np.zeros(0, dtype=complex) for _ in range(fs.q_sup)]
    first = np.zeros(fs.q_sup, dtype=np.int64)
    frames = {}
    for q in qs:
        hop = fs.elements[q].hop
        k = int(rng.integers(0, max(1, n // hop)))
        frames.setdefault(int(q), {})[k] = complex(rng.normal(), rng.normal())
    for q, d in frames.items():
        lo, hi = min(d), max(d)
        c = np.zeros(hi - lo + 1, dtype=complex)
        for k, v in d.items():
            c[k - lo] = v
        coeffs[q] = c
        first[q] = lo
    return _render(fs, coeffs, first, 0, n, _weights(fs.q_sup))


def measure_err(x, y, delay: int, trim: int = 0) -> float:
    """Negative SNR (dB) of ``y`` against ``x`` delayed by ``delay`` samples.

    ``trim`` samples are discarded at both ends before taking RMS values.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if y.size < n + delay:
        raise ValueError(f"output too short: {y.size} < {n + delay}")
    if n <= 2 * trim:
        raise ValueError(f"signal of {n} samples is too short for trimming {trim} per side")
    ref = x[trim:n - trim]
    res = y[delay + trim:delay + n - trim] - ref
    num = math.sqrt(np.mean(res ** 2))
    den = math.sqrt(np.mean(ref ** 2))
    if den == 0.0:
        return ERR_FLOOR if num == 0.0 else math.inf
    if num == 0.0:
        return ERR_FLOOR
    return max(ERR_FLOOR, 20 * math.log10(num / den))


# -- suites -----------------------------------------------------------------

@dataclass
class ErrorReport:
    rows: list = field(default_factory=list)
    presets: dict = field(default_factory=dict)

    def table(self, delimiter=",") -> str:
        buf = io.StringIO()
        w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(r.get(c)) for c in COLUMNS])
        return buf.getvalue()

    def text(self) -> str:
        lines = []
        for name, cfg in self.presets.items():
            lines.append(f"[{name}] " + " ".join(f"{k}={v}" for k, v in cfg.items()))
        width = max([len(r["signal"]) for r in self.rows] + [6])
        for r in self.rows:
            err = r["err_dB"]
            shown = "skipped" if err is None else f"{err:7.1f} dB"
            lines.append(f"{r['signal']:<{width}}  {shown}  (N_avg={r['N_avg']:.0f}, "
                         f"q_sup={r['q_sup']}, sum_Tq={r['sum_Tq']:.2f} s)")
        return "\n".join(lines)

    def err(self, label) -> float:
        for r in self.rows:
            if r["signal"] == label:
                return r["err_dB"]
        raise KeyError(label)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _row(label, cfg: Config, fs: FrameSet, err, wall):
    p = fs.params
    cost = estimate_cost(fs)
    return {
        "signal": label, "err_dB": err, "R": p.R, "K": p.K, "b": p.b, "q_sup": p.q_sup,
        "a": p.a, "C_b": p.C_b, "C_d": p.C_d, "C_cut": p.C_cut, "T_max": p.T_max,
        "N_avg": cost["N_avg"], "wall_ms": wall, "sum_Tq": cost["sum_Tq"], "C_Tc": p.C_Tc,
    }


def run_signal(cfg: Config, fs: FrameSet, spec: TestSignal) -> float:
    x = gen_signal(spec, fs)
    y, lat = roundtrip(x, fs)
    return measure_err(x, y, lat.delay_samples, trim=int(round(cfg.T_max * cfg.sr)))


def _table_rows(base: Config, signals, wavs, duration, seed):
    fs = build_frameset(*setup(base))
    rows = []
    for kind, param in signals:
        spec = TestSignal(kind, duration, base.sr, seed, param)
        t = time.perf_counter()
        try:
            err = run_signal(base, fs, spec)
        except Exception as exc:  # a failing row must not abort the suite
            log.error("%s: %s", spec.label, exc)
            err = math.nan
        rows.append(_row(spec.label, base, fs, err, 1000 * (time.perf_counter() - t)))
    for label in ("beet", "speech", "fire"):
        path = (wavs or {}).get(label)
        if path is None:
            rows.append(_row(label, base, fs, None, 0.0))
            continue
        t = time.perf_counter()
        err = run_signal(base, fs, TestSignal("wav", duration, base.sr, seed, path))
        rows.append(_row(label, base, fs, err, 1000 * (time.perf_counter() - t)))
    return rows


TABLE_SIGNALS = [("white", None), ("sine", 30.0), ("sine", 440.0), ("sine", 20000.0),
                 ("const", None), ("clicks", 1.0), ("atoms", 20.0)]

R_SWEEP = (2.0, 2.5, 3.0)
TC_SWEEP = (1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.5, 5.0)
CUT_SWEEP = (20.0, 55.0, 150.0, 400.0, 1000.0, 3000.0, 1e4)


def influence_r_config(R: float, **overrides) -> Config:
    """Gaussian window on a fixed time grid a = 1/24 s with window length T = R a.

    R then sets b = 1/(a R C_b) and K = 2R keeps BW = 24 Hz.  The amplitude
    threshold is disabled so that only ``T_max`` limits the atoms.
    """
    a = 1.0 / 24.0
    kw = dict(R=R, K=2 * R, a=a, T=R * a, C_d=2.0, C_Tc=2.0, T_max=0.629, C_cut=1e6)
    kw.update(overrides)
    return preset("gaussian", **kw)


def run_suite(suite: str, duration: float = 5.0, seed: int = 0, overrides=None,
              wavs=None) -> ErrorReport:
    """Run one of the benchmark suites in ``SUITES``.

    ``overrides`` are Config fields applied to every row's preset.
    """
    overrides = dict(overrides or {})
    report = ErrorReport()
    if suite in ("gaussian", "rcw"):
        base = preset(suite, **overrides)
        report.presets[suite] = vars(base)
        report.rows = _table_rows(base, TABLE_SIGNALS, wavs, duration, seed)
        return report
    if suite == "influence_R":
        cfgs = [(f"R={R:g}", influence_r_config(R, **overrides)) for R in R_SWEEP]
    elif suite == "Tc_sweep":
        cfgs = [(f"{name} C_Tc={c:g}", preset(name, **{**overrides, "C_Tc": c}))
                for name in ("rcw", "gaussian") for c in TC_SWEEP]
    elif suite == "sumTq_sweep":
        cfgs = [(f"{name} C_cut={c:g}", preset(name, **{**overrides, "C_cut": c}))
                for name in ("rcw", "gaussian") for c in CUT_SWEEP]
    else:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    for label, cfg in cfgs:
        t = time.perf_counter()
        try:
            fs = build_frameset(*setup(cfg))
            err = run_signal(cfg, fs, TestSignal("white", duration, cfg.sr, seed))
            row = _row(label, cfg, fs, err, 0.0)
        except Exception as exc:
            log.error("%s: %s", label, exc)
            row = {c: None for c in COLUMNS} | {"signal": label, "err_dB": math.nan,
                                                  "sum_Tq": math.nan, "N_avg": math.nan,
                                                  "q_sup": None}
        row["wall_ms"] = 1000 * (time.perf_counter() - t)
        report.presets[label] = vars(cfg)
        report.rows.append(row)
    return report


SUITES = ("rcw", "gaussian", "influence_R", "Tc_sweep", "sumTq_sweep")
