"""Command-line entry point (``warpframe <command> ...``)."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, dump_config, load_config, parse_overrides, preset
from .engine import (EngineError, analyze, estimate_cost, latency, load_coefficients,
                     pr_diagnostic, roundtrip, save_coefficients, synthesize)
from .framegen import CacheError, build_frameset, load_frameset, save_frameset
from .params import setup
from .signals import SUITES, measure_err, run_suite
from .wavio import read_wav, write_wav

log = logging.getLogger("warpframe")


class CliError(Exception):
    pass


def _config(args):
    if args.config:
        return load_config(args.config)
    return preset(args.preset)


def _frames(args):
    """Frame set from ``--cache`` if it exists, otherwise built from the config."""
    cache = args.cache
    if cache is None and args.config:
        cache = _config(args).cache
    if cache and Path(cache).exists():
        return load_frameset(cache)
    fs = build_frameset(*setup(_config(args)))
    if cache:
        save_frameset(fs, cache)
        log.info("wrote frame cache %s", cache)
    return fs


def _read_input(args, fs):
    if not args.inp:
        raise CliError("--in is required")
    x, sr = read_wav(args.inp)
    if sr != fs.sr:
        raise CliError(f"{args.inp}: sampling rate {sr:g} Hz does not match the frames ({fs.sr:g} Hz)")
    return x


def _need_out(args):
    if not args.out:
        raise CliError("--out is required")
    return args.out


def _fmt_k(v):
    return f"{v / 1000:.2f}k"


def cmd_build(args):
    cfg = _config(args)
    cache = args.cache or cfg.cache
    if not cache:
        raise CliError("no cache path: pass --cache or set cache= in the config")
    fs = build_frameset(*setup(cfg))
    digest = save_frameset(fs, cache)
    cost = estimate_cost(fs)
    mem = fs.memory_bounds()
    print(f"q_sup={fs.q_sup}")
    print(f"N_avg={cost['N_avg']:.0f} ({_fmt_k(cost['N_avg'])} flops/sample)")
    print(f"sum_Tq={cost['sum_Tq']:.4f} s  max_Tq={cost['max_Tq']:.4f} s")
    print(f"memory_cells per_band_buffers={mem['per_band_buffers']} "
          f"shared_buffer={mem['shared_buffer']} minimal={mem['minimal']}")
    print(f"cache={cache} bytes={Path(cache).stat().st_size} sha256={digest}")


def cmd_roundtrip(args):
    fs = _frames(args)
    out = _need_out(args)
    x = _read_input(args, fs)
    trim = int(round(fs.params.T_max * fs.sr))
    if x.size <= 2 * trim:
        raise CliError(f"input of {x.size} samples is too short for the {trim}-sample "
                       "edge trim on each side")
    y, lat = roundtrip(x, fs)
    d = lat.delay_samples
    err = measure_err(x, y, d, trim)
    write_wav(out, y[d:d + x.size], fs.sr)
    print(f"delay_samples={d}")
    print(f"err_dB={err:.2f}")


def cmd_analyze(args):
    fs = _frames(args)
    out = _need_out(args)
    c = analyze(_read_input(args, fs), fs)
    save_coefficients(c, out)
    print(f"frames={int(c.counts().sum())} bands={c.q_sup} flops_per_sample={c.flops / c.n_samples:.0f}")


def cmd_synthesize(args):
    fs = _frames(args)
    out = _need_out(args)
    if not args.inp:
        raise CliError("--in is required")
    c = load_coefficients(args.inp)
    if c.sr != fs.sr:
        raise CliError(f"coefficients at {c.sr:g} Hz do not match the frames ({fs.sr:g} Hz)")
    y = synthesize(c, fs)
    write_wav(out, y, fs.sr)
    print(f"samples={y.size} delay_samples={latency(fs).delay_samples}")


def cmd_bench(args):
    if not args.suite:
        raise CliError(f"--suite is required ({', '.join(SUITES)})")
    overrides = {}
    if args.config:
        # explicit keys only; each suite picks its own presets
        _, overrides = parse_overrides(Path(args.config).read_text())
        for k in ("seed", "duration", "cache"):
            overrides.pop(k, None)
    wavs = dict(w.split("=", 1) for w in args.wav or [])
    rep = run_suite(args.suite, duration=args.duration, seed=args.seed,
                    overrides=overrides, wavs=wavs)
    print(rep.text())
    print()
    table = rep.table()
    print(table, end="")
    if args.out:
        Path(args.out).write_text(table)
    failed = [r["signal"] for r in rep.rows
              if r["err_dB"] is not None and not math.isfinite(r["err_dB"])]
    if failed:
        raise CliError(f"{len(failed)} row(s) failed: {', '.join(failed)}")


def cmd_info(args):
    fs = _frames(args)
    p = fs.params
    print("[params]")
    for k, v in p.scalars().items():
        print(f"{k} = {v}")
    print(f"hops = {p.hops.tolist()}")
    print(f"d = {np.round(p.d, 6).tolist()}")
    print(f"centers = {np.round(p.centers, 3).tolist()}")
    print(f"bw = {np.round(p.bw, 3).tolist()}")
    print("[map]")
    for k, v in fs.wmap.describe().items():
        print(f"{k} = {v}")
    print("[window]")
    for k, v in fs.window.describe().items():
        print(f"{k} = {v}")
    cost = estimate_cost(fs)
    print("[cost]")
    for k in ("N_avg", "worst_frame", "min_hop", "max_hop", "lcm_hop", "sum_Tq", "max_Tq",
              "buffer_cells"):
        print(f"{k} = {cost[k]}")
    print("[memory]")
    for k, v in fs.memory_bounds().items():
        print(f"{k} = {v}")
    diag = pr_diagnostic(fs)
    print("[frame_operator]")
    print(f"max_dev = {diag['max_dev']:.3e}")
    print(f"bound_ratio = {diag['bound_ratio']:.9f}")
    print(f"delay_samples = {latency(fs).delay_samples}")
    print(f"sha256 = {fs.hash}")


def cmd_atoms(args):
    fs = _frames(args)
    out = _need_out(args)
    if args.band is None:
        raise CliError("--band is required")
    if not 0 <= args.band < fs.q_sup:
        raise CliError(f"--band {args.band} outside [0, {fs.q_sup})")
    e = fs.elements[args.band]
    write_wav(out, e.samples.real, fs.sr)
    print(f"band={e.q} length={e.length} center={e.center} hop={e.hop} "
          f"center_hz={fs.params.centers[e.q]:.3f} trunc_loss={e.trunc_loss:.3e}")


def cmd_config(args):
    print(dump_config(_config(args)), end="")


COMMANDS = {
    "build": (cmd_build, "derive parameters, build the frames and write the cache"),
    "roundtrip": (cmd_roundtrip, "analyse and resynthesise a WAV file, print err"),
    "analyze": (cmd_analyze, "write the coefficients of a WAV file"),
    "synthesize": (cmd_synthesize, "rebuild a WAV file from a coefficient file"),
    "bench": (cmd_bench, "run a benchmark suite"),
    "info": (cmd_info, "print parameters, cost and memory figures"),
    "atoms": (cmd_atoms, "write the real part of one band's atom as a WAV file"),
    "config": (cmd_config, "print the effective configuration"),
}


def build_parser():
    ap = argparse.ArgumentParser(prog="warpframe", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="key=value configuration file")
        sp.add_argument("--preset", default="gaussian", help="preset used without --config")
        sp.add_argument("--cache", help="frame cache file")
        sp.add_argument("--in", dest="inp", help="input file")
        sp.add_argument("--out", help="output file")
        sp.add_argument("--suite", choices=SUITES)
        sp.add_argument("--duration", type=float, default=5.0, help="signal length in s")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--band", type=int)
        sp.add_argument("--wav", action="append", metavar="LABEL=PATH",
                        help="recording for the beet/speech/fire rows")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command][0](args)
    except (CliError, ConfigError, CacheError, EngineError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
