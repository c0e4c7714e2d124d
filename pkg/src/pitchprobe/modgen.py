"""Six-term cosine window design and modulation-signal shaping."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .errors import ParameterError
from .orthoseq import MixSignal

# Minimax-optimal six-term coefficients (peak-normalized cosine series).
# Sidelobes measure below -143 dB for every length >= 64.
WINDOW_COEFFICIENTS = (
    0.2934400117322964,
    0.45186937388006454,
    0.2015283196504629,
    0.047993434404205955,
    0.005032212918663692,
    0.00013664741430651834,
)


@dataclass(frozen=True, eq=False)
class CosineSeriesWindow:
    coefficients: tuple[float, ...]
    length: int
    samples: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class ModulationSignal:
    cents: np.ndarray = field(repr=False)
    rate: int
    target_sd: float


def design_window(length: int) -> CosineSeriesWindow:
    """Sample the six-term series; w[n] = sum_k b_k cos(2 pi k (n-c)/(N-1))."""
    if length < 64:
        raise ParameterError("window length below 64 cannot meet the sidelobe floor")
    n = np.arange(length)
    x = 2.0 * np.pi * (n - (length - 1) / 2.0) / (length - 1)
    w = np.zeros(length)
    for k, b in enumerate(WINDOW_COEFFICIENTS):
        w += b * np.cos(k * x)
    return CosineSeriesWindow(
        coefficients=WINDOW_COEFFICIENTS, length=length, samples=w
    )


def window_sidelobe_db(window: CosineSeriesWindow, zero_pad: int = 32) -> float:
    """Maximum sidelobe of the window spectrum, dB re main-lobe peak."""
    n = 1
    while n < window.length * zero_pad:
        n *= 2
    spec = np.abs(np.fft.rfft(window.samples, n))
    spec /= spec[0]
    # sidelobes start past the first null; find it by the first local rise
    d = np.diff(spec)
    first_null = int(np.argmax(d > 0))
    return float(20.0 * np.log10(spec[first_null:].max() + 1e-300))


def make_modulation(
    mix: MixSignal,
    window: CosineSeriesWindow,
    target_sd: float,
    rate: int,
    t_r: int,
) -> ModulationSignal:
    """Smooth the mix, remove the mean, scale to the target SD in cents.

    The convolution is delay-compensated so each smoothed pulse center
    stays at its allocation origin (within half a sample for even lengths).
    """
    if window.length >= t_r:
        raise ParameterError("smoothing window must be shorter than t_r")
    kernel = window.samples / window.samples.sum()
    full = fftconvolve(mix.mix, kernel)
    shift = window.length // 2
    cents = full[shift : shift + len(mix.mix)].copy()
    cents -= cents.mean()
    sd = cents.std()
    if sd > 0.0:
        cents *= target_sd / sd
    return ModulationSignal(cents=cents, rate=rate, target_sd=target_sd)


def max_transition_rate(mod: ModulationSignal) -> float:
    """Fastest log-frequency change, cents per second."""
    if len(mod.cents) == 0:
        raise ParameterError("empty modulation")
    if len(mod.cents) == 1:
        return 0.0
    return float(np.abs(np.diff(mod.cents)).max() * mod.rate)
