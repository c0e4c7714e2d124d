"""Level calibration helpers: pink reference noise, meter math, clock offset.

Level convention: dBFS is sine-referenced. A full-scale sinusoid reads
0 dBFS, so dbfs(x) = 20*log10(rms(x) * sqrt(2)).
"""

from __future__ import annotations

import numpy as np

from ..errors import ParameterError

PINK_SEED = 19181716
PINK_RMS_DBFS = -20.0
PINK_BAND_HZ = (20.0, 16000.0)


def dbfs(samples: np.ndarray) -> float:
    """Sine-referenced level of a block: a full-scale sine reads 0 dBFS."""
    rms = float(np.sqrt(np.mean(np.square(np.asarray(samples, float)))))
    return 20.0 * float(np.log10(rms * np.sqrt(2.0) + 1e-300))


def pink_noise(duration: float, rate: int, seed: int = PINK_SEED) -> np.ndarray:
    """Deterministic pink calibration noise at exactly -20 dBFS RMS.

    Spectral amplitude falls as 1/sqrt(f) (power density 1/f, i.e.
    -3 dB/octave) across the audible band; outside the band the spectrum
    is zero.
    """
    if duration <= 0.0:
        raise ParameterError("duration must be positive")
    n = int(round(duration * rate))
    rng = np.random.default_rng(seed)
    f = np.fft.rfftfreq(n, 1.0 / rate)
    amp = np.zeros(len(f))
    band = (f >= PINK_BAND_HZ[0]) & (f <= PINK_BAND_HZ[1])
    amp[band] = 1.0 / np.sqrt(f[band])
    phase = rng.uniform(0.0, 2.0 * np.pi, len(f))
    spec = amp * np.exp(1j * phase)
    spec[0] = 0.0
    if n % 2 == 0:
        spec[-1] = spec[-1].real
    x = np.fft.irfft(spec, n)
    target_rms = 10.0 ** (PINK_RMS_DBFS / 20.0) / np.sqrt(2.0)
    x *= target_rms / np.sqrt(np.mean(x**2))
    return x


def octave_band_slope(samples: np.ndarray, rate: int) -> np.ndarray:
    """Mean power density (dB) per octave band from 50 Hz to 10 kHz.

    Returns levels relative to the first band; a -3 dB/octave source gives
    steps of about -3.01 dB.
    """
    spec = np.abs(np.fft.rfft(samples)) ** 2
    f = np.fft.rfftfreq(len(samples), 1.0 / rate)
    edges = 50.0 * 2.0 ** np.arange(0.0, 8.0)
    levels = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (f >= lo) & (f < hi)
        levels.append(10.0 * np.log10(np.mean(spec[sel])))
    levels = np.asarray(levels)
    return levels - levels[0]


def measure_clock_offset(
    reference: np.ndarray, recording: np.ndarray, rate: int
) -> float:
    """Lag (samples, sub-sample precision) of a recording behind its
    reference signal. Positive means the recording starts late."""
    ref = np.asarray(reference, float)
    rec = np.asarray(recording, float)
    if len(ref) == 0 or len(rec) == 0:
        raise ParameterError("empty signal")
    n = 1
    while n < len(ref) + len(rec):
        n *= 2
    xc = np.fft.irfft(np.fft.rfft(rec, n) * np.conj(np.fft.rfft(ref, n)), n)
    i = int(np.argmax(xc))
    if 0 < i < n - 1:
        denom = xc[i - 1] - 2.0 * xc[i] + xc[i + 1]
        frac = 0.0 if denom == 0.0 else 0.5 * (xc[i - 1] - xc[i + 1]) / denom
    else:
        frac = 0.0
    lag = i if i <= n // 2 else i - n
    return float(lag + frac)
