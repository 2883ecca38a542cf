"""Mono WAV input/output on top of :mod:`scipy.io.wavfile`."""

from __future__ import annotations

import logging

import numpy as np
from scipy.io import wavfile

log = logging.getLogger(__name__)

_INT_SCALE = {np.dtype("int16"): 2.0 ** 15, np.dtype("int32"): 2.0 ** 31,
              np.dtype("uint8"): None}


def read_wav(path):
    """Return ``(samples, sr)`` as float64 in [-1, 1]; stereo is downmixed."""
    try:
        sr, data = wavfile.read(path)
    except (ValueError, OSError) as exc:
        raise ValueError(f"{path}: cannot read WAV ({exc})") from exc
    if data.dtype == np.uint8:
        x = (data.astype(float) - 128.0) / 128.0
    elif data.dtype.kind == "i":
        # scipy left-justifies 24-bit PCM into int32
        x = data.astype(float) / _INT_SCALE[data.dtype]
    elif data.dtype.kind == "f":
        x = data.astype(float)
    else:
        raise ValueError(f"{path}: unsupported sample format {data.dtype}")
    if x.ndim == 2:
        if x.shape[1] > 1:
            log.warning("%s: %d channels downmixed to mono", path, x.shape[1])
        x = x.mean(axis=1)
    return x, float(sr)


def write_wav(path, x, sr):
    """Write a 64-bit float mono WAV (lossless for the round-trip output)."""
    wavfile.write(path, int(round(sr)), np.asarray(x, dtype=np.float64))
