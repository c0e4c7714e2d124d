"""Instantaneous-frequency tracking of known-target-pitch signals.

The tracker convolves with a complex analytic bandpass (six-term cosine
envelope times a complex exponential), then reads frequency from adjacent
samples: f_i[n] = angle(y[n+1] * conj(y[n])) * rate / (2 pi). The filter's
main lobe attenuates modulation content, a known linear distortion in the
small-deviation regime, so the cents trace is re-equalized in the spectral
domain before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve

from .errors import ParameterError
from .modgen import design_window

REJECTION_DB = -115.0       # required window sidelobe at the neighbor offset
SILENCE_DBFS = -70.0
EQUALIZER_EPS = 0.05


@dataclass(frozen=True, eq=False)
class AnalyticFilter:
    h_c: np.ndarray = field(repr=False)
    center: float
    length: int
    group_delay: int
    rate: int
    f_target: float
    anchor: int


@dataclass(frozen=True, eq=False)
class F0Trajectory:
    hz: np.ndarray = field(repr=False)
    cents: np.ndarray = field(repr=False)
    valid: np.ndarray = field(repr=False)
    f_target: float
    rate: int
    valid_range: tuple[int, int]


def _window_level_beyond(length: int, offset_hz: float, rate: int) -> float:
    """Max spectrum magnitude (dB re DC) of the length-N window at or past
    the given frequency offset."""
    w = design_window(length).samples
    n = 1
    while n < length * 32:
        n *= 2
    spec = np.abs(np.fft.rfft(w / w.sum(), n))
    freqs = np.arange(len(spec)) * rate / n
    tail = spec[freqs >= offset_hz]
    return float(20.0 * np.log10(tail.max() + 1e-300))


@lru_cache(maxsize=32)
def _filter_length(offset_hz: float, rate: int) -> int:
    """Smallest odd window length with <= REJECTION_DB beyond offset_hz."""
    lo, hi = 65, 65
    while _window_level_beyond(hi, offset_hz, rate) > REJECTION_DB:
        hi = hi * 2 + 1
        if hi > 1 << 20:
            raise ParameterError("rejection target unreachable at this rate")
    lo = hi // 2
    while hi - lo > 2:
        mid = (lo + hi) // 2
        mid += 1 - mid % 2  # keep odd
        if _window_level_beyond(mid, offset_hz, rate) > REJECTION_DB:
            lo = mid
        else:
            hi = mid
    return hi


def design_analytic_filter(
    f_target: float, rate: int, anchor: int = 1
) -> AnalyticFilter:
    """Bandpass centered at anchor*f_target, rejecting the nearest
    interfering component (offset f_target) far below the tracking floor."""
    if not 0.0 < f_target < rate / 4.0:
        raise ParameterError("f_target must lie in (0, rate/4)")
    if anchor < 1:
        raise ParameterError("anchor harmonic must be >= 1")
    center = anchor * f_target
    if center >= rate / 2.0:
        raise ParameterError("anchor harmonic is above Nyquist")
    length = _filter_length(float(f_target), rate)
    n = np.arange(length)
    gd = (length - 1) // 2
    env = design_window(length).samples
    h_c = env * np.exp(2j * np.pi * center * (n - gd) / rate)
    h_c /= env.sum()
    return AnalyticFilter(
        h_c=h_c,
        center=center,
        length=length,
        group_delay=gd,
        rate=rate,
        f_target=f_target,
        anchor=anchor,
    )


def modulation_transfer(filt: AnalyticFilter, offsets_hz: np.ndarray) -> np.ndarray:
    """Gain seen by modulation content at the given offsets from center.

    Equals the filter envelope's lowpass response (unity at zero offset).
    """
    env = np.real(filt.h_c * np.exp(
        -2j * np.pi * filt.center * (np.arange(filt.length) - filt.group_delay)
        / filt.rate
    ))
    n = 1
    while n < filt.length * 32:
        n *= 2
    spec = np.abs(np.fft.rfft(env, n))
    spec /= spec[0]
    fax = np.arange(len(spec)) * filt.rate / n
    return np.interp(np.abs(offsets_hz), fax, spec, right=0.0)


def _equalize_cents(cents: np.ndarray, filt: AnalyticFilter) -> np.ndarray:
    """Invert the filter's modulation lowpass with a regularized equalizer."""
    n = len(cents)
    spec = np.fft.rfft(cents)
    g = modulation_transfer(filt, np.fft.rfftfreq(n, 1.0 / filt.rate))
    eps = EQUALIZER_EPS
    eq = (1.0 + eps * eps) * g / (g * g + eps * eps)
    return np.fft.irfft(spec * eq, n)


def extract_f0(signal: np.ndarray, filt: AnalyticFilter) -> F0Trajectory:
    """Track the instantaneous frequency of `signal` through the filter.

    Returns a trajectory referenced to the fundamental: cents are relative
    to f_target regardless of the anchor harmonic the filter sits on.
    """
    n = len(signal)
    if n < 4 * filt.length:
        raise ParameterError("signal too short for this analysis filter")
    y = fftconvolve(signal, filt.h_c)
    y = y[filt.group_delay : filt.group_delay + n]

    f_i = np.empty(n)
    f_i[:-1] = np.angle(y[1:] * np.conj(y[:-1])) * filt.rate / (2.0 * np.pi)
    f_i[-1] = f_i[-2]

    valid = np.abs(y) >= 10.0 ** (SILENCE_DBFS / 20.0)
    valid_range = (filt.length, n - filt.length)
    inside = np.zeros(n, bool)
    inside[valid_range[0] : valid_range[1]] = True
    valid &= inside

    with np.errstate(divide="ignore", invalid="ignore"):
        cents_raw = 1200.0 * np.log2(np.where(f_i > 0, f_i, filt.center) / filt.center)
    # bridge invalid stretches from valid neighbors so the equalizer sees no
    # artificial steps at the valid-range edges
    if valid.any():
        idx = np.flatnonzero(valid)
        cents_raw = np.interp(np.arange(n), idx, cents_raw[idx])
    else:
        cents_raw = np.zeros(n)
    cents = _equalize_cents(cents_raw, filt)

    hz = filt.f_target * 2.0 ** (cents / 1200.0)
    return F0Trajectory(
        hz=hz,
        cents=cents,
        valid=valid,
        f_target=filt.f_target,
        rate=filt.rate,
        valid_range=valid_range,
    )


def hz_to_cents(f: float, f_ref: float) -> float:
    if f <= 0.0 or f_ref <= 0.0:
        raise ParameterError("frequencies must be positive")
    return 1200.0 * float(np.log2(f / f_ref))
