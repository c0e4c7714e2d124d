"""Frequency-modulated carrier synthesis (single sine or harmonic complex)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .modgen import ModulationSignal
from .orthoseq import OrthogonalSet

PHASE_MODES = ("sine", "cosine", "alternating", "random", "schroeder")


@dataclass(frozen=True)
class CarrierSpec:
    f_target: float = 130.0
    harmonics: tuple[int, ...] = tuple(range(1, 21))
    amplitudes: tuple[float, ...] | None = None
    phase_mode: str = "sine"
    phase_seed: int | None = None

    def resolved_amplitudes(self) -> np.ndarray:
        if self.amplitudes is None:
            return np.ones(len(self.harmonics))
        if len(self.amplitudes) != len(self.harmonics):
            raise ParameterError("amplitudes must match harmonics")
        a = np.asarray(self.amplitudes, float)
        if np.any(a <= 0):
            raise ParameterError("amplitudes must be positive")
        return a


@dataclass(frozen=True, eq=False)
class TestStimulus:
    audio: np.ndarray = field(repr=False)
    modulation: ModulationSignal
    carrier: CarrierSpec
    orthogonal_set: OrthogonalSet
    rate: int


def phase_offsets(
    mode: str, harmonics: tuple[int, ...], seed: int | None = None
) -> np.ndarray:
    if mode not in PHASE_MODES:
        raise ParameterError(f"unknown phase mode {mode!r}")
    k = np.asarray(harmonics)
    if mode == "sine":
        return np.zeros(len(k))
    if mode == "cosine":
        return np.full(len(k), np.pi / 2.0)
    if mode == "alternating":
        return np.where(k % 2 == 1, 0.0, np.pi / 2.0)
    if mode == "random":
        rng = np.random.default_rng(seed)
        return rng.uniform(0.0, 2.0 * np.pi, len(k))
    # schroeder, down-sweep form
    return -np.pi * k * (k - 1) / len(k)


def render_carrier(
    cents: np.ndarray, carrier: CarrierSpec, rate: int
) -> np.ndarray:
    """FM synthesis by phase accumulation in double precision.

    f0[n] = f_target * 2^(cents[n]/1200); Phi[0] = 0; the output is the sum
    of harmonics k at phase k*Phi + phi_k, peak-normalized to 0.99.
    """
    if not carrier.harmonics:
        raise ParameterError("harmonics must be non-empty")
    worst = max(carrier.harmonics) * carrier.f_target * 2.0 ** (
        np.max(np.abs(cents), initial=0.0) / 1200.0
    )
    if worst >= rate / 2.0:
        raise ParameterError("carrier would alias: reduce harmonics or modulation")

    f0 = carrier.f_target * 2.0 ** (np.asarray(cents, float) / 1200.0)
    phi = 2.0 * np.pi / rate * (np.cumsum(f0) - f0[0])
    amps = carrier.resolved_amplitudes()
    offs = phase_offsets(carrier.phase_mode, carrier.harmonics, carrier.phase_seed)
    audio = np.zeros(len(phi))
    for k, a, p in zip(carrier.harmonics, amps, offs):
        audio += a * np.sin(k * phi + p)
    peak = np.abs(audio).max()
    if peak > 0.0:
        audio *= 0.99 / peak
    return audio


def synthesize(
    mod: ModulationSignal,
    carrier: CarrierSpec,
    rate: int,
    orthogonal_set: OrthogonalSet,
) -> TestStimulus:
    """Render the modulated test stimulus for one session."""
    return TestStimulus(
        audio=render_carrier(mod.cents, carrier, rate),
        modulation=mod,
        carrier=carrier,
        orthogonal_set=orthogonal_set,
        rate=rate,
    )
