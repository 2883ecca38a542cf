"""Prototype windows with closed-form Fourier transforms.

Transforms use the convention ``hhat(nu) = int h(t) exp(-2j pi nu t) dt``.
Both families are normalised so that, with time step ``a = T / overlap`` and
any frequency step ``b``, the squared transforms sum to ``a`` over the
frequency lattice (exactly for the raised cosine when ``b <= 1/T``, up to a
negligible ripple for the Gaussian).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GAUSS_C",
    "PrototypeWindow",
    "make_raised_cosine",
    "make_gaussian",
    "make_window",
]

#: Overlap-add constant of the Gaussian family.
GAUSS_C = 0.893249

RAISED_COSINE = "raised-cosine"
GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class PrototypeWindow:
    """Analysis/synthesis prototype ``h`` and its transform ``hhat``.

    ``overlap`` is the time-domain redundancy ``T / a`` used in the amplitude;
    it equals ``R`` unless the time step ``a`` was overridden.
    """

    kind: str
    T: float
    R: float
    b: float
    overlap: float
    amp: float
    C_gauss: float = GAUSS_C

    @property
    def freq_amp(self) -> float:
        """Value of ``hhat(0)``."""
        if self.kind == GAUSSIAN:
            return self.C_gauss * self.T * math.sqrt(self.b / self.overlap)
        return self.amp * self.T * 2.0 / math.pi

    def time_eval(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == GAUSSIAN:
            return self.amp * np.exp(-((math.pi * t / self.T) ** 2))
        inside = np.abs(t) <= self.T / 2
        return np.where(inside, self.amp * np.cos(math.pi * t / self.T), 0.0)

    def freq_eval(self, nu):
        nu = np.asarray(nu, dtype=float)
        if self.kind == GAUSSIAN:
            return self.freq_amp * np.exp(-((nu * self.T) ** 2))
        x = nu * self.T
        return 0.5 * self.amp * self.T * (np.sinc(x - 0.5) + np.sinc(x + 0.5))

    def describe(self) -> dict:
        return {
            "window.kind": self.kind,
            "window.T": self.T,
            "window.R": self.R,
            "window.overlap": self.overlap,
            "window.amp": self.amp,
        }


def _overlap(T, R, a):
    return R if a is None else T / a


def make_raised_cosine(T: float, b: float, R: float, a: float | None = None):
    """Raised cosine ``sqrt(2b/R) cos(pi t / T)`` supported on ``[-T/2, T/2]``.

    If ``a`` is given the amplitude uses ``T / a`` in place of ``R``.
    """
    if T <= 0 or b <= 0:
        raise ValueError("T and b must be positive")
    if R < 3:
        raise ValueError(f"raised cosine needs R >= 3, got {R}")
    ov = _overlap(T, R, a)
    return PrototypeWindow(RAISED_COSINE, float(T), float(R), float(b), float(ov),
                           math.sqrt(2.0 * b / ov))


def make_gaussian(T: float, b: float, R: float, a: float | None = None):
    """Gaussian with ``hhat(nu) = C T sqrt(b/R) exp(-(nu T)^2)``.

    The matching time function is ``C sqrt(pi b / R) exp(-(pi t / T)^2)``.
    """
    if T <= 0 or b <= 0:
        raise ValueError("T and b must be positive")
    if R < 2:
        raise ValueError(f"gaussian needs R >= 2, got {R}")
    ov = _overlap(T, R, a)
    amp = GAUSS_C * math.sqrt(math.pi * b / ov)
    return PrototypeWindow(GAUSSIAN, float(T), float(R), float(b), float(ov), amp)


def make_window(kind: str, T: float, b: float, R: float, a: float | None = None):
    if kind == GAUSSIAN:
        return make_gaussian(T, b, R, a)
    if kind == RAISED_COSINE:
        return make_raised_cosine(T, b, R, a)
    raise ValueError(f"unknown window kind {kind!r}")
