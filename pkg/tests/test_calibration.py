from __future__ import annotations

import numpy as np
import pytest

from pitchprobe.session.calibration import (
    PINK_RMS_DBFS,
    dbfs,
    measure_clock_offset,
    octave_band_slope,
    pink_noise,
)
from pitchprobe.subjsim import loopback_channel

RATE = 44100


def test_dbfs_sine_reference():
    t = np.arange(RATE) / RATE
    assert dbfs(np.sin(2 * np.pi * 1000 * t)) == pytest.approx(0.0, abs=1e-6)
    assert dbfs(0.1 * np.sin(2 * np.pi * 1000 * t)) == pytest.approx(-20.0, abs=1e-6)
    assert dbfs(np.zeros(100)) < -200.0


def test_pink_level_is_exact():
    noise = pink_noise(2.0, RATE)
    assert len(noise) == 2 * RATE
    assert dbfs(noise) == pytest.approx(PINK_RMS_DBFS, abs=1e-9)
    assert np.abs(noise).max() <= 1.0


def test_pink_deterministic():
    np.testing.assert_array_equal(pink_noise(1.0, RATE), pink_noise(1.0, RATE))
    assert not np.array_equal(pink_noise(1.0, RATE), pink_noise(1.0, RATE, seed=1))


def test_pink_band_limits():
    noise = pink_noise(4.0, RATE)
    spec = np.abs(np.fft.rfft(noise)) ** 2
    f = np.fft.rfftfreq(len(noise), 1 / RATE)
    in_band = spec[(f >= 20.0) & (f <= 16000.0)].sum()
    out_band = spec[(f < 20.0) | (f > 16000.0)].sum()
    assert out_band / in_band < 1e-20


def test_octave_slope():
    slopes = octave_band_slope(pink_noise(8.0, RATE), RATE)
    assert slopes[0] == 0.0
    steps = np.diff(slopes)
    np.testing.assert_allclose(steps, -3.01, atol=1.0)


def test_clock_offset_integer():
    rng = np.random.default_rng(3)
    ref = rng.standard_normal(RATE)
    rec = np.concatenate([np.zeros(250), ref])[:RATE]
    assert measure_clock_offset(ref, rec, RATE) == pytest.approx(250.0, abs=0.05)


def test_clock_offset_fractional():
    ref = pink_noise(1.0, RATE)
    rec = loopback_channel(ref, 123.4 / RATE, RATE)
    assert measure_clock_offset(ref, rec, RATE) == pytest.approx(123.4, abs=0.05)


def test_clock_offset_sign():
    rng = np.random.default_rng(4)
    rec = rng.standard_normal(RATE)
    ref = np.concatenate([np.zeros(40), rec])[:RATE]
    # recording leads the reference: negative offset
    assert measure_clock_offset(ref, rec, RATE) == pytest.approx(-40.0, abs=0.05)
