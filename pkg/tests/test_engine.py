import math

import numpy as np
import pytest

from conftest import small_config
from warpframe import (CoefficientStream, EngineError, analyze, build_frameset,
                       estimate_cost, latency, load_coefficients, pr_diagnostic, roundtrip,
                       save_coefficients, setup, synthesize)
from warpframe.engine import Analyzer, Streamer, frame_range
from warpframe.params import derive
from warpframe.signals import measure_err
from warpframe.warpmap import identity_map
from warpframe.window import make_window

RNG = np.random.default_rng(42)


def loop_analysis(x, fs):
    """Direct sum over every frame whose support meets the signal."""
    out = []
    for q, e in enumerate(fs.elements):
        lo, hi = frame_range(fs, q, x.size)
        c = np.zeros(hi - lo, dtype=complex)
        for i, n in enumerate(range(lo, hi)):
            start = n * e.hop - e.center
            for j in range(e.length):
                t = start + j
                if 0 <= t < x.size:
                    c[i] += x[t] * np.conj(e.samples[j])
        out.append((lo, c))
    return out


def loop_synthesis(coeffs, fs, n_samples):
    """Sum over bands -q_sup+1 .. q_sup-1, negative bands built by conjugation.

    Bands +top and -top alias onto the same Nyquist band, so each counts half.
    """
    top = fs.q_sup - 1
    y = np.zeros(n_samples, dtype=complex)
    for q, e in enumerate(fs.elements):
        lo = int(coeffs.first[q])
        for i, cn in enumerate(coeffs.coeffs[q]):
            start = (lo + i) * e.hop - e.center
            t = np.arange(start, start + e.length)
            ok = (t >= 0) & (t < n_samples)
            term = cn * e.samples[ok]
            if q == 0:
                y[t[ok]] += term
            elif q == top:
                y[t[ok]] += 0.5 * (term + np.conj(term))
            else:
                y[t[ok]] += term + np.conj(term)
    return y


@pytest.fixture(scope="module")
def tiny():
    """Very short atoms so that the loop oracle stays fast."""
    return build_frameset(*setup(small_config(C_cut=8.0, T_max=0.03)))


def test_analysis_matches_loop(tiny):
    x = RNG.standard_normal(700)
    c = analyze(x, tiny)
    for q, (lo, ref) in enumerate(loop_analysis(x, tiny)):
        assert c.first[q] == lo
        assert np.allclose(c.coeffs[q], ref, rtol=0, atol=1e-12 * np.abs(ref).max())


def test_synthesis_matches_loop(tiny):
    x = RNG.standard_normal(500)
    c = analyze(x, tiny)
    y = synthesize(c, tiny)
    full = loop_synthesis(c, tiny, x.size)
    assert np.max(np.abs(full.imag)) < 1e-12 * np.max(np.abs(full.real))
    assert np.allclose(y, full.real, rtol=0, atol=1e-12 * np.abs(y).max())


def test_frame_ranges_cover_support(small_fs):
    n = 3000
    for q, e in enumerate(small_fs.elements):
        lo, hi = frame_range(small_fs, q, n)
        first_end = lo * e.hop - e.center + e.length - 1
        assert first_end >= 0 and first_end - e.hop < 0
        last_start = (hi - 1) * e.hop - e.center
        assert last_start <= n - 1 and last_start + e.hop > n - 1


def test_zero_in_zero_out(small_fs):
    c = analyze(np.zeros(2000), small_fs)
    assert all(np.all(v == 0) for v in c.coeffs)
    assert np.all(synthesize(c, small_fs) == 0)


def test_linearity(small_fs):
    x, z = RNG.standard_normal((2, 4000))
    cx, cz = analyze(x, small_fs), analyze(z, small_fs)
    cs = analyze(2.5 * x - 0.75 * z, small_fs)
    for a, b, s in zip(cx.coeffs, cz.coeffs, cs.coeffs):
        ref = 2.5 * a - 0.75 * b
        assert np.max(np.abs(s - ref)) <= 1e-12 * max(1.0, np.abs(ref).max())


def test_single_coefficient_gives_atom(small_fs):
    n = 4000
    for q in (0, 17, small_fs.q_sup - 1, 50):
        e = small_fs.elements[q]
        coeffs = [np.zeros(0, complex) for _ in range(small_fs.q_sup)]
        coeffs[q] = np.array([1.0 + 0j])
        m = -(-(e.center + 10) // e.hop)
        first = np.zeros(small_fs.q_sup, dtype=np.int64)
        first[q] = m
        cs = CoefficientStream(small_fs.sr, n, small_fs.hash,
                               np.array([el.hop for el in small_fs.elements]), first, coeffs)
        y = synthesize(cs, small_fs)
        w = 1.0 if q in (0, small_fs.q_sup - 1) else 2.0
        start = m * e.hop - e.center
        ref = np.zeros(n)
        ref[start:start + e.length] = w * e.samples.real
        assert np.allclose(y, ref, rtol=0, atol=1e-15)


def test_atom_input_peaks_at_own_frame(small_fs):
    n = 6000
    q, m = 45, 7
    e = small_fs.elements[q]
    x = np.zeros(n)
    start = m * e.hop - e.center
    x[start:start + e.length] = 2 * e.samples.real
    c = analyze(x, small_fs)
    best = max(((abs(v).max(), qq, int(c.first[qq] + np.argmax(abs(v))))
                for qq, v in enumerate(c.coeffs) if v.size), key=lambda r: r[0])
    assert best[1:] == (q, m)


def test_click_delay_exact(small_fs):
    n = 6000
    for pos in (2500, 3001):
        x = np.zeros(n)
        x[pos] = 1.0
        y, lat = roundtrip(x, small_fs)
        assert y.size == n + lat.delay_samples
        assert int(np.argmax(np.abs(y))) == pos + lat.delay_samples


def test_latency(small_fs):
    lat = latency(small_fs)
    assert lat.delay_samples == small_fs.max_length - 1 >= 0
    assert lat.band_delays.max() == lat.delay_samples


@pytest.mark.parametrize("block", [1, 37, 1000, 4096])
def test_block_invariance(small_fs, block):
    x = RNG.standard_normal(2500 if block == 1 else 9000)
    whole, lat = roundtrip(x, small_fs)
    blocks, lat2 = roundtrip(x, small_fs, block_size=block)
    assert lat2.delay_samples == lat.delay_samples
    assert whole.tobytes() == blocks.tobytes()
    a = analyze(x, small_fs)
    b = analyze(x, small_fs, block_size=block)
    assert all(u.tobytes() == v.tobytes() for u, v in zip(a.coeffs, b.coeffs))
    assert np.array_equal(a.first, b.first)


def test_streamer_emits_causally(small_fs):
    st = Streamer(small_fs)
    x = RNG.standard_normal(5000)
    got = 0
    for i in range(0, x.size, 500):
        got += st.process(x[i:i + 500]).size
        # never emits output that depends on samples not seen yet
        assert got <= i + 500 + st.delay
    got += st.flush().size
    assert got == x.size + st.delay


def test_analyze_then_synthesize_equals_roundtrip(small_fs):
    x = RNG.standard_normal(5000)
    y, lat = roundtrip(x, small_fs)
    aligned = synthesize(analyze(x, small_fs), small_fs)
    d = lat.delay_samples
    assert aligned.tobytes() == y[d:d + x.size].tobytes()


def test_shift_covariance(small_fs):
    bands = [60, 70, 80]
    hops = [small_fs.elements[q].hop for q in bands]
    s = math.lcm(*hops)
    x = RNG.standard_normal(6000)
    xs = np.concatenate([np.zeros(s), x])
    c, cs = analyze(x, small_fs), analyze(xs, small_fs)
    for q, h in zip(bands, hops):
        k = s // h
        a = c.coeffs[q]
        b = cs.coeffs[q]
        off = int(c.first[q] + k - cs.first[q])
        assert np.allclose(b[off:off + a.size], a, rtol=1e-9, atol=1e-12)


def test_energy_sanity(gauss_fs):
    x = RNG.standard_normal(3 * 44100)
    c = analyze(x, gauss_fs)
    w = np.full(gauss_fs.q_sup, 2.0)
    w[0] = w[-1] = 1.0
    ratio = sum(wq * np.vdot(v, v).real for wq, v in zip(w, c.coeffs)) / np.dot(x, x)
    diag = pr_diagnostic(gauss_fs)
    assert diag["min"] / 2 <= ratio <= 2 * diag["max"]


def test_flop_counter(small_fs):
    x = RNG.standard_normal(40000)
    c = analyze(x, small_fs)
    n_avg = estimate_cost(small_fs)["N_avg"]
    assert c.flops / x.size == pytest.approx(n_avg, rel=0.15)


def test_cost_report(gauss_fs):
    cost = estimate_cost(gauss_fs)
    L = gauss_fs.lengths
    h = np.array([e.hop for e in gauss_fs.elements])
    assert cost["N_avg"] == pytest.approx(np.sum(4 * L / h))
    assert cost["worst_frame"] == pytest.approx(4 * L.sum())
    assert 5000 <= cost["N_avg"] <= 10000
    assert cost["lcm_hop"] % cost["max_hop"] == 0


def test_frame_operator(gauss_fs):
    d = pr_diagnostic(gauss_fs)
    # Poisson ripple of the Gaussian lattice sum, C^2 sqrt(pi/2) - 1 ~ 1.16e-5
    assert d["max_dev"] == pytest.approx(1.16e-5, rel=0.05)
    assert d["bound_ratio"] < 1 + 1e-6


def test_frame_operator_ignores_hops():
    from warpframe import preset
    a = pr_diagnostic(build_frameset(*setup(small_config())))
    b = pr_diagnostic(build_frameset(*setup(small_config(C_d=4.0))))
    assert np.array_equal(a["D"], b["D"])
    assert preset("gaussian").C_d == 2.0


def test_frame_operator_identity_raised_cosine():
    from warpframe import preset
    sr = 8004.0
    cfg = preset("gaussian", kind="raised-cosine", sr=sr, C_Tc=2.0, T_max=0.2, C_cut=20)
    w = make_window(cfg.kind, cfg.T, 3.0, cfg.R)
    m = identity_map(sr)
    p = derive(cfg, m, w)
    fs = build_frameset(p, m, w)
    d = pr_diagnostic(fs)
    interior = (d["f"] > 50) & (d["f"] < sr / 2 - 50)
    assert np.max(np.abs(d["D"][interior] - 1)) < 1e-9


def test_coefficient_file(tmp_path, small_fs):
    x = RNG.standard_normal(3000)
    c = analyze(x, small_fs)
    path = tmp_path / "c.wgc"
    save_coefficients(c, path)
    assert path.read_bytes()[:4] == b"WGC1"
    back = load_coefficients(path)
    assert back.frame_hash == c.frame_hash and back.n_samples == c.n_samples
    assert np.array_equal(back.first, c.first) and np.array_equal(back.hops, c.hops)
    assert all(u.tobytes() == v.tobytes() for u, v in zip(back.coeffs, c.coeffs))
    assert synthesize(back, small_fs).tobytes() == synthesize(c, small_fs).tobytes()
    path.write_bytes(b"nope" + path.read_bytes()[4:])
    with pytest.raises(EngineError, match="magic"):
        load_coefficients(path)


def test_errors(small_fs, gauss_fs):
    with pytest.raises(EngineError):
        analyze(np.zeros(0), small_fs)
    with pytest.raises(EngineError):
        analyze(np.zeros(10, complex), small_fs)
    with pytest.raises(EngineError, match="sampling rate"):
        analyze(np.zeros(10), small_fs, sr=44100.0)
    c = analyze(np.ones(100), small_fs)
    with pytest.raises(EngineError, match="different frame"):
        synthesize(c, gauss_fs)
    an = Analyzer(small_fs)
    an.process(np.ones(10))
    an.flush()
    with pytest.raises(EngineError):
        an.process(np.ones(10))


def test_small_roundtrip_quality(small_fs):
    x = RNG.uniform(-1, 1, 4 * 8000)
    y, lat = roundtrip(x, small_fs)
    assert measure_err(x, y, lat.delay_samples, trim=int(0.15 * 8000)) < -40
