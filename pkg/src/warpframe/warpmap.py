"""Frequency warping maps.

The map used throughout the package is exponential in its core,

    theta(nu) = f0 * 2 ** (nu / k),

with linear tails on both sides chosen so that the result is odd, strictly
increasing and continuously differentiable.  The lower tail is the tangent
of the exponential that passes through the origin; the upper tail is the
tangent that hits the Nyquist frequency exactly on a band centre ``q * b``,
so the map is linear around Nyquist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

__all__ = ["WarpMap", "build_exp_map", "identity_map"]

LN2 = math.log(2.0)


@dataclass(frozen=True)
class WarpMap:
    """Odd, C1, piecewise exponential/linear frequency warping map.

    Attributes
    ----------
    f0, k : float
        Core parameters, ``theta(nu) = f0 * 2**(nu/k)`` on ``[nu_in, nu_out]``.
    f_in, f_out : float
        Physical frequencies (Hz) of the two seams.
    nu_in, nu_out : float
        Warped-axis seams.
    slope_lo, slope_hi : float
        Slopes of the lower (through the origin) and upper tails.
    sr : float
        Sampling rate.
    nu_top : float
        Warped frequency mapped onto ``sr / 2``.
    """

    f0: float
    k: float
    f_in: float
    f_out: float
    nu_in: float
    nu_out: float
    slope_lo: float
    slope_hi: float
    sr: float
    nu_top: float

    @property
    def nyquist(self) -> float:
        return self.sr / 2.0

    @property
    def min_slope(self) -> float:
        """Infimum of the derivative (attained on the lower tail)."""
        return min(self.slope_lo, self.slope_hi)

    def __call__(self, nu):
        return self.eval(nu)

    def eval(self, nu):
        nu = np.asarray(nu, dtype=float)
        x = np.abs(nu)
        out = np.empty_like(x)
        lo = x < self.nu_in
        hi = x >= self.nu_out
        core = ~(lo | hi)
        out[lo] = self.slope_lo * x[lo]
        out[core] = self.f0 * np.exp2(x[core] / self.k)
        out[hi] = self.f_out + self.slope_hi * (x[hi] - self.nu_out)
        out = np.copysign(out, nu)
        return out[()] if out.ndim == 0 else out

    def eval_inverse(self, f):
        f = np.asarray(f, dtype=float)
        y = np.abs(f)
        out = np.empty_like(y)
        lo = y < self.f_in
        hi = y >= self.f_out
        core = ~(lo | hi)
        out[lo] = y[lo] / self.slope_lo
        out[core] = self.k * np.log2(y[core] / self.f0)
        out[hi] = self.nu_out + (y[hi] - self.f_out) / self.slope_hi
        out = np.copysign(out, f)
        return out[()] if out.ndim == 0 else out

    def eval_derivative(self, nu):
        nu = np.asarray(nu, dtype=float)
        x = np.abs(nu)
        out = np.empty_like(x)
        lo = x < self.nu_in
        hi = x >= self.nu_out
        core = ~(lo | hi)
        out[lo] = self.slope_lo
        out[core] = self.f0 * LN2 / self.k * np.exp2(x[core] / self.k)
        out[hi] = self.slope_hi
        return out[()] if out.ndim == 0 else out

    def describe(self) -> dict:
        return {
            "map.f0": self.f0,
            "map.k": self.k,
            "map.f_in": self.f_in,
            "map.f_out": self.f_out,
            "map.nu_in": self.nu_in,
            "map.nu_out": self.nu_out,
            "map.slope_lo": self.slope_lo,
            "map.slope_hi": self.slope_hi,
            "map.nu_top": self.nu_top,
        }


def build_exp_map(f0: float, k: float, sr: float, b: float) -> WarpMap:
    """Construct the C1 exponential map hitting Nyquist on the band grid.

    Parameters
    ----------
    f0 : float
        Frequency (Hz) of the exponential core at ``nu = 0``.
    k : float
        Warped-axis length of one octave.
    sr : float
        Sampling rate (Hz).
    b : float
        Band spacing on the warped axis; ``theta(q*b) = sr/2`` for an integer q.

    Raises
    ------
    ValueError
        On non-positive parameters or when no C1 construction exists.
    """
    if min(f0, k, sr, b) <= 0:
        raise ValueError("f0, k, sr and b must all be positive")
    nyq = sr / 2.0
    # tangent through the origin touches f0*2**(nu/k) at nu = k / ln 2
    nu_in = k / LN2
    f_in = f0 * math.e
    if f_in >= nyq:
        raise ValueError(
            f"lower seam at {f_in:.3f} Hz is above Nyquist ({nyq} Hz); "
            "decrease f0"
        )
    slope_lo = f_in / nu_in

    def core(x):
        return f0 * 2.0 ** (x / k)

    def dcore(x):
        return f0 * LN2 / k * 2.0 ** (x / k)

    nu_core = k * math.log2(nyq / f0)
    q_top = math.ceil(nu_core / b - 1e-12)
    nu_top = q_top * b
    if nu_top <= nu_in:
        raise ValueError("k too small: Nyquist is reached before the lower seam")

    if core(nu_top) - nyq <= 1e-12 * nyq:
        nu_out = nu_top
    else:
        # the tangent at x passes through (nu_top, nyq); increasing in x
        def resid(x):
            return core(x) + dcore(x) * (nu_top - x) - nyq

        if resid(nu_in) >= 0:
            raise ValueError("no bracketing interval for the upper seam")
        nu_out = brentq(resid, nu_in, nu_top, xtol=1e-13, rtol=4 * np.finfo(float).eps)
        if abs(resid(nu_out)) > 1e-9:
            raise ValueError("upper seam root find did not converge")
    f_out = core(nu_out)
    slope_hi = dcore(nu_out)
    return WarpMap(
        f0=float(f0),
        k=float(k),
        f_in=float(f_in),
        f_out=float(f_out),
        nu_in=float(nu_in),
        nu_out=float(nu_out),
        slope_lo=float(slope_lo),
        slope_hi=float(slope_hi),
        sr=float(sr),
        nu_top=float(nu_top),
    )


def identity_map(sr: float) -> WarpMap:
    """The identity ``theta(nu) = nu``, expressed as a degenerate WarpMap."""
    nyq = sr / 2.0
    return WarpMap(
        f0=1.0,
        k=1.0,
        f_in=np.inf,
        f_out=np.inf,
        nu_in=np.inf,
        nu_out=np.inf,
        slope_lo=1.0,
        slope_hi=1.0,
        sr=float(sr),
        nu_top=nyq,
    )
