import math

import numpy as np
import pytest

from warpframe.window import GAUSS_C, make_gaussian, make_raised_cosine, make_window

SR = 44100.0
N = 1 << 20


def dft_oracle(w):
    """Transform of ``h`` sampled at SR on a zero-padded grid (centred at t=0)."""
    t = (np.arange(N) - N // 2) / SR
    h = w.time_eval(t)
    spec = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(h))).real / SR
    nu = np.fft.fftshift(np.fft.fftfreq(N, 1 / SR))
    return nu, spec


def test_gauss_constant():
    assert GAUSS_C == pytest.approx(0.893249, abs=5e-7)
    # the constant squares the lattice sum to one: C^2 sqrt(pi/2) = 1
    assert GAUSS_C ** 2 * math.sqrt(math.pi / 2) == pytest.approx(1.0, abs=2e-5)


@pytest.mark.parametrize("make, T, tol", [(make_raised_cosine, 0.30, 1e-9),
                                           (make_gaussian, 1 / 6, 1e-6)])
def test_transform_matches_dft(make, T, tol):
    w = make(T, 3.0, 4.0)
    nu, spec = dft_oracle(w)
    sel = np.abs(nu) < 60
    # the DFT of samples sees the transform periodised over the sampling rate
    ref = sum(w.freq_eval(nu[sel] + k * SR) for k in range(-200, 201))
    assert np.max(np.abs(spec[sel] - ref)) / np.max(np.abs(ref)) < tol


def test_raised_cosine_values():
    T, b, R = 0.3, 12 / 7, 7.0
    w = make_raised_cosine(T, b, R)
    assert w.time_eval(T / 2) == pytest.approx(0.0, abs=1e-15)
    assert w.time_eval(-T / 2) == pytest.approx(0.0, abs=1e-15)
    assert w.time_eval(T) == 0.0
    assert w.time_eval(0.0) == pytest.approx(math.sqrt(2 * b / R))
    # sinc(+-1/2) = 2/pi; the continuous transform carries the duration T
    assert w.freq_eval(0.0) == pytest.approx(T * math.sqrt(b / (2 * R)) * 4 / math.pi, rel=1e-12)


def test_gaussian_values():
    T, b, R = 1 / 6, 3.0, 4.0
    w = make_gaussian(T, b, R)
    assert w.time_eval(0.0) == pytest.approx(GAUSS_C * math.sqrt(math.pi * b / R))
    assert w.freq_eval(0.0) == pytest.approx(GAUSS_C * T * math.sqrt(b / R))
    assert np.all(w.freq_eval(np.linspace(-100, 100, 999)) > 0)


def test_even():
    nu = np.linspace(0, 100, 333)
    for w in (make_gaussian(1 / 6, 3, 4), make_raised_cosine(0.3, 1.7, 7)):
        assert np.array_equal(w.freq_eval(-nu), w.freq_eval(nu))
        assert np.array_equal(w.time_eval(-nu / 1000), w.time_eval(nu / 1000))


def test_decay_contrast():
    T = 1 / 6
    g = make_gaussian(T, 3, 4)
    # 3 essential bandwidths of 24 Hz
    assert g.freq_eval(72.0) < 1e-3 * g.freq_eval(0.0)
    nu = np.linspace(6 / T, 20 / T, 500)
    assert np.all(g.freq_eval(nu) < 1e-8 * g.freq_eval(0.0))
    r = make_raised_cosine(T, 3, 4)
    nu = np.linspace(5 / T, 10 / T, 2001)
    assert np.max(np.abs(r.freq_eval(nu))) > 1e-3 * r.freq_eval(0.0)


@pytest.mark.parametrize("make", [make_gaussian, make_raised_cosine])
def test_lattice_sum(make):
    """sum_q |hhat(nu - q b)|^2 / a = 1 for a = T/R."""
    T, R = 1 / 6, 4.0
    b = 1 / (T / R * R * 2)
    w = make(T, b, R)
    nu = np.linspace(0, b, 101)
    q = np.arange(-400, 401)[:, None]
    D = (w.freq_eval(nu - q * b) ** 2).sum(axis=0) / (T / R)
    assert np.max(np.abs(D - 1)) < 2e-5


def test_override_amplitude():
    # with a given explicitly the amplitude follows T / a
    w = make_gaussian(0.3, 12 / 7, 7.0, a=1 / 24)
    assert w.overlap == pytest.approx(7.2)


def test_rejects():
    with pytest.raises(ValueError):
        make_raised_cosine(0.3, 2, 2)
    with pytest.raises(ValueError):
        make_gaussian(0.3, 2, 1.5)
    with pytest.raises(ValueError):
        make_window("hann", 0.3, 2, 4)
    with pytest.raises(ValueError):
        make_gaussian(-1, 2, 4)
