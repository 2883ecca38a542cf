"""Derived sampling-grid parameters and frame-condition checks."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .config import Config
from .warpmap import WarpMap, build_exp_map
from .window import PrototypeWindow, make_window

__all__ = ["FrameParams", "FrameConditionError", "FrameReport", "derive", "setup",
           "check_frame_conditions"]

log = logging.getLogger(__name__)
_warned_rk = set()


class FrameConditionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FrameParams:
    sr: float
    K: float
    R: float
    a: float
    b: float
    BW: float
    q_sup: int
    centers: np.ndarray  # f_q = theta(q b), Hz
    bw: np.ndarray  # BW_q, Hz
    hops: np.ndarray  # n_q, samples
    C_b: float
    C_d: float
    C_cut: float
    C_Tc: float
    T: float
    T_c: float
    T_max: float
    N_c: int
    theta_inf: float
    uniform_hop: bool = False

    @property
    def d(self) -> np.ndarray:
        return self.hops / self.sr

    def scalars(self) -> dict:
        return {
            "sr": self.sr, "K": self.K, "R": self.R, "a": self.a, "b": self.b,
            "BW": self.BW, "q_sup": self.q_sup, "C_b": self.C_b, "C_d": self.C_d,
            "C_cut": self.C_cut, "C_Tc": self.C_Tc, "T": self.T, "T_c": self.T_c,
            "T_max": self.T_max, "N_c": self.N_c, "theta_inf": self.theta_inf,
            "uniform_hop": int(self.uniform_hop),
        }


@dataclass
class FrameReport:
    ok: bool
    abK_margin: float
    hop_margins: np.ndarray = field(repr=False)
    failures: list = field(default_factory=list)


def check_frame_conditions(p: FrameParams, tol: float = 1e-12) -> FrameReport:
    """Check ``a b K <= 1`` and ``d_q BW_q <= 1`` for every band."""
    abK = 1.0 - p.a * p.b * p.K
    hop = 1.0 - p.d * p.bw
    failures = []
    if abK < -tol:
        failures.append(f"abK = {p.a * p.b * p.K:.6g} > 1")
    bad = np.flatnonzero(hop < -tol)
    if bad.size:
        failures.append(
            f"d_q*BW_q > 1 for {bad.size} band(s), worst q={bad[np.argmin(hop[bad])]} "
            f"({1 - hop.min():.6g})"
        )
    return FrameReport(not failures, abK, hop, failures)


def _time_step(cfg: Config) -> float:
    return cfg.T / cfg.R if cfg.a is None else cfg.a


def derive(cfg: Config, wmap: WarpMap, window: PrototypeWindow) -> FrameParams:
    """Derive all grid parameters for ``cfg`` and fail on a violated frame condition."""
    if cfg.R != cfg.K and (cfg.R, cfg.K) not in _warned_rk:
        _warned_rk.add((cfg.R, cfg.K))
        log.warning("R (%g) != K (%g): overlap and essential bandwidth set separately",
                    cfg.R, cfg.K)
    sr = float(cfg.sr)
    a = _time_step(cfg)
    b = 1.0 / (a * cfg.R * cfg.C_b)
    BW = cfg.K * b
    q_top = wmap.nu_top / b
    if abs(q_top - round(q_top)) >= 0.5 or abs(wmap.eval(round(q_top) * b) - sr / 2) > 1e-6:
        raise FrameConditionError(
            "warping map does not reach Nyquist on the band grid "
            f"(theta^-1(sr/2)/b = {q_top:.4f})"
        )
    q_sup = int(round(q_top)) + 1
    nu = np.arange(q_sup) * b
    centers = wmap.eval(nu)
    bw = wmap.eval(nu + BW / 2) - wmap.eval(nu - BW / 2)
    hops = np.maximum(1, np.floor(sr / (bw * cfg.C_d))).astype(np.int64)
    if cfg.uniform_hop:
        hops[:] = hops.min()
    grid = np.linspace(0.0, (q_sup - 1) * b, 20 * q_sup + 1)
    theta_inf = float(wmap.eval_derivative(grid).min())
    T_c = window.T / theta_inf * cfg.C_Tc
    N_c = 1 << int(math.ceil(math.log2(T_c * sr)))
    p = FrameParams(
        sr=sr, K=float(cfg.K), R=float(cfg.R), a=a, b=b, BW=BW, q_sup=q_sup,
        centers=centers, bw=bw, hops=hops, C_b=cfg.C_b, C_d=cfg.C_d,
        C_cut=cfg.C_cut, C_Tc=cfg.C_Tc, T=window.T, T_c=T_c, T_max=cfg.T_max,
        N_c=N_c, theta_inf=theta_inf, uniform_hop=cfg.uniform_hop,
    )
    report = check_frame_conditions(p)
    if not report.ok:
        raise FrameConditionError("; ".join(report.failures))
    return p


def setup(cfg: Config):
    """Build ``(params, map, window)`` for a configuration."""
    cfg.validate()
    a = _time_step(cfg)
    b = 1.0 / (a * cfg.R * cfg.C_b)
    wmap = build_exp_map(cfg.f0, cfg.k, cfg.sr, b)
    window = make_window(cfg.kind, cfg.T, b, cfg.R, cfg.a)
    return derive(cfg, wmap, window), wmap, window
