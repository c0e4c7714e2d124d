"""Closed-loop subject simulator for end-to-end validation.

The simulated subject hears the modulated stimulus, applies a linear
compensatory reflex (second-order lowpass kernel, negative gain, fixed
latency), adds slow drift plus fast jitter, and re-renders the sum as a
voice signal. A loopback channel with an arbitrary fractional delay stands
in for the audio interface during calibration checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.signal import fftconvolve

from .errors import ParameterError
from .stimsynth import CarrierSpec, TestStimulus, render_carrier

DRIFT_CUTOFF_HZ = 1.0
DRIFT_FLOOR_HZ = 0.05
JITTER_CUTOFF_HZ = 25.0
KERNEL_TAIL = 1e-9


@dataclass(frozen=True)
class SubjectModel:
    gain: float = -0.1
    latency: float = 0.1
    kernel_natural_hz: float = 40.0
    kernel_damping: float = 1.0
    drift_sd: float = 1.0
    jitter_sd: float = 0.5
    voice: CarrierSpec = dc_field(default_factory=CarrierSpec)


def reflex_kernel(model: SubjectModel, rate: int) -> np.ndarray:
    """Unit-DC impulse response of the subject's second-order dynamics."""
    if model.kernel_natural_hz <= 0.0 or model.kernel_damping <= 0.0:
        raise ParameterError("kernel parameters must be positive")
    w = 2.0 * np.pi * model.kernel_natural_hz
    z = model.kernel_damping
    # slowest pole sets the tail; overdamped kernels decay much slower than z*w
    slow = w * (z - np.sqrt(z * z - 1.0)) if z >= 1.0 else z * w
    t_max = min(4.0, -np.log(KERNEL_TAIL) / slow + 0.05)
    t = np.arange(int(np.ceil(t_max * rate))) / rate
    if z == 1.0:
        h = w * w * t * np.exp(-w * t)
    elif z < 1.0:
        wd = w * np.sqrt(1.0 - z * z)
        h = w * w / wd * np.exp(-z * w * t) * np.sin(wd * t)
    else:
        s = w * np.sqrt(z * z - 1.0)
        h = w * w / (2.0 * s) * (np.exp(-(z * w - s) * t) - np.exp(-(z * w + s) * t))
    total = h.sum()
    if total <= 0.0:
        raise ParameterError("degenerate reflex kernel")
    return h / total


def _band_noise(
    rng: np.random.Generator, n: int, rate: int, cutoff: float, floor: float | None
) -> np.ndarray:
    """Gaussian noise shaped in the spectral domain below `cutoff`.

    With a floor frequency the amplitude rises as 1/f toward DC (integrated
    white: random-walk-like drift); without one the band is flat.
    """
    white = rng.standard_normal(n)
    spec = np.fft.rfft(white)
    f = np.fft.rfftfreq(n, 1.0 / rate)
    shape = np.where(f <= cutoff, 1.0, 0.0)
    if floor is not None:
        shape = shape / np.maximum(f, floor)
    spec *= shape
    spec[0] = 0.0
    out = np.fft.irfft(spec, n)
    rms = np.sqrt(np.mean(out**2))
    if rms > 0.0:
        out /= rms
    return out


def simulate_subject(
    stimulus: TestStimulus, model: SubjectModel, seed: int
) -> np.ndarray:
    """Render the subject's voice in response to a stimulus.

    The compensatory path convolves the heard cents trace with the reflex
    kernel, scales by the (negative) gain, and delays by the round-trip
    latency. Drift and jitter are seeded, so a (stimulus, model, seed)
    triple always produces the identical waveform.
    """
    rate = stimulus.rate
    cents_in = stimulus.modulation.cents
    n = len(cents_in)
    rng = np.random.default_rng(seed)

    h = reflex_kernel(model, rate)
    tracked = model.gain * fftconvolve(cents_in, h)[:n]
    delay = int(round(model.latency * rate))
    if delay >= n:
        raise ParameterError("latency exceeds the stimulus duration")
    if delay > 0:
        tracked = np.concatenate([np.zeros(delay), tracked[: n - delay]])

    drift = model.drift_sd * _band_noise(rng, n, rate, DRIFT_CUTOFF_HZ, DRIFT_FLOOR_HZ)
    jitter = model.jitter_sd * _band_noise(rng, n, rate, JITTER_CUTOFF_HZ, None)

    voiced = tracked + drift + jitter
    return render_carrier(voiced, model.voice, rate)


def loopback_channel(
    signal: np.ndarray, delay_s: float, rate: int
) -> np.ndarray:
    """Delay a signal by an arbitrary (fractional) number of samples.

    Implemented as a pure spectral phase ramp, so the magnitude response is
    exactly flat; the output is padded long enough to hold the shifted
    signal plus the analysis tail.
    """
    if delay_s < 0.0:
        raise ParameterError("loopback delay must be non-negative")
    d = delay_s * rate
    n = len(signal) + int(np.ceil(d)) + 64
    spec = np.fft.rfft(signal, n)
    spec *= np.exp(-2j * np.pi * np.fft.rfftfreq(n) * d)
    return np.fft.irfft(spec, n)
