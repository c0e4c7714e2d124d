"""Unit extended time-stretched pulse (CAPRICEP) generation.

A unit pulse is an all-pass FIR whose group delay follows a raised-cosine
sweep of the buffer, so the temporal power envelope is a raised cosine and
matched filtering compresses the pulse to a near-delta. The sweep wraps the
buffer several times (each wrap covers one frequency sub-band for the full
duration) and a seeded zero-mean detour field decorrelates pulses built
from different seeds without disturbing the envelope.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import (
    TSP_DURATION,
    TSP_FIELD_RMS,
    TSP_STAGES,
    TSP_WIDTH_FLOOR,
    TSP_WIDTH_SCALE,
    TSP_WRAPS,
)
from .errors import ParameterError

# inverse CDF of the raised-cosine envelope, tabulated once:
# F(x) = x - sin(2*pi*x)/(2*pi) maps [0,1] onto [0,1] monotonically
_GRID = np.linspace(0.0, 1.0, 1 << 16)
_RC_CDF = _GRID - np.sin(2.0 * np.pi * _GRID) / (2.0 * np.pi)


@dataclass(frozen=True, eq=False)
class UnitTsp:
    """One all-pass unit pulse plus the parameters that reproduce it."""

    samples: np.ndarray = field(repr=False)
    seed: int
    rate: int
    nominal_duration: float

    @property
    def length(self) -> int:
        return len(self.samples)

    @property
    def energy(self) -> float:
        return float(np.dot(self.samples, self.samples))


def generate_unit_tsp(
    seed: int,
    nominal_duration: float = TSP_DURATION,
    rate: int = 44100,
    wraps: int = TSP_WRAPS,
    stages: int = TSP_STAGES,
    field_rms: float = TSP_FIELD_RMS,
    width_scale: float = TSP_WIDTH_SCALE,
    width_floor: float = TSP_WIDTH_FLOOR,
) -> UnitTsp:
    """Build the unit pulse for one seed.

    The spectrum is exp(j*phi[k]) with phi the cumulative sum of a group
    delay trajectory tau(f); magnitude is identically 1 except the zeroed
    DC and Nyquist bins, so the pulse is all-pass on its own length grid
    and the stored buffer needs no truncation.
    """
    if nominal_duration <= 0 or rate <= 0:
        raise ParameterError("duration and rate must be positive")
    if wraps < 1 or stages < 1:
        raise ParameterError("wraps and stages must be >= 1")

    rng = np.random.default_rng(seed)
    length = int(round(nominal_duration * rate))
    m = length // 2 + 1
    v = np.arange(m) / (m - 1)

    offset = rng.uniform(0.0, 1.0)
    centers = np.exp(
        rng.uniform(np.log(2.0 / nominal_duration), np.log(0.475 * rate), stages)
    )
    signs = rng.choice([-1.0, 1.0], stages)
    vc = centers / (rate / 2.0)

    detour = np.zeros(m)
    for center_v, sign in zip(vc, signs):
        width = max(center_v * width_scale, width_floor)
        detour += sign * np.exp(-0.5 * ((v - center_v) / width) ** 2)
    rms = np.sqrt(np.mean(detour * detour))
    if rms > 0.0:
        detour *= field_rms / rms
    # pin the field ends so the wrapped sweep covers exactly `wraps` turns
    detour -= detour[0] + (detour[-1] - detour[0]) * v

    position = np.mod(offset + wraps * v + detour, 1.0)
    tau = np.interp(position, _RC_CDF, _GRID) * length

    phi = np.zeros(m)
    phi[1:] = -np.cumsum(tau[1:]) * (2.0 * np.pi / length)
    spectrum = np.exp(1j * phi)
    spectrum[0] = 0.0
    spectrum[-1] = 0.0
    samples = np.fft.irfft(spectrum, length)
    return UnitTsp(
        samples=samples, seed=seed, rate=rate, nominal_duration=nominal_duration
    )


def temporal_power_envelope(tsp: UnitTsp, smoothing: float = 0.010) -> np.ndarray:
    """Smoothed instantaneous power, for envelope checks (moving average)."""
    win = max(1, int(round(smoothing * tsp.rate)))
    kernel = np.ones(win) / win
    return np.convolve(tsp.samples**2, kernel, mode="same")


def raised_cosine_reference(length: int) -> np.ndarray:
    """Target power envelope sin^2(pi*t/T) over the stored buffer."""
    t = np.arange(length) / length
    return np.sin(np.pi * t) ** 2
