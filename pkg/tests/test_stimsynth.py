from __future__ import annotations

import numpy as np
import pytest

from pitchprobe.errors import ParameterError
from pitchprobe.stimsynth import (
    CarrierSpec,
    phase_offsets,
    render_carrier,
    synthesize,
)

RATE = 44100


def spectrum_peak_hz(audio: np.ndarray, rate: int) -> float:
    mag = np.abs(np.fft.rfft(audio * np.hanning(len(audio))))
    return float(np.fft.rfftfreq(len(audio), 1 / rate)[np.argmax(mag)])


def test_phase_offsets_modes():
    h = (1, 2, 3, 4)
    np.testing.assert_array_equal(phase_offsets("sine", h), np.zeros(4))
    np.testing.assert_allclose(phase_offsets("cosine", h), np.full(4, np.pi / 2))
    np.testing.assert_allclose(
        phase_offsets("alternating", h), [0, np.pi / 2, 0, np.pi / 2]
    )
    # Schroeder phases for K components: -pi k (k-1) / K
    np.testing.assert_allclose(
        phase_offsets("schroeder", (1, 2, 3)), [0, -2 * np.pi / 3, -2 * np.pi]
    )
    a = phase_offsets("random", h, seed=7)
    b = phase_offsets("random", h, seed=7)
    c = phase_offsets("random", h, seed=8)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    with pytest.raises(ParameterError):
        phase_offsets("square", h)


def test_pure_tone():
    cents = np.zeros(RATE)
    audio = render_carrier(cents, CarrierSpec(f_target=130.0, harmonics=(1,)), RATE)
    assert audio[0] == pytest.approx(0.0, abs=1e-12)
    assert np.abs(audio).max() == pytest.approx(0.99, abs=1e-6)
    assert spectrum_peak_hz(audio, RATE) == pytest.approx(130.0, abs=2.0)


def test_constant_offset_shifts_frequency():
    cents = np.full(RATE, 1200.0)
    audio = render_carrier(cents, CarrierSpec(f_target=130.0, harmonics=(1,)), RATE)
    assert spectrum_peak_hz(audio, RATE) == pytest.approx(260.0, abs=2.0)


def test_harmonic_magnitudes_are_phase_invariant():
    # 2 s at 130 Hz puts every harmonic on an exact bin; the magnitude
    # profile (relative to the fundamental) must not depend on phase mode
    cents = np.zeros(2 * RATE)
    freqs = np.fft.rfftfreq(len(cents), 1 / RATE)
    bins = [np.argmin(np.abs(freqs - 130.0 * k)) for k in range(1, 6)]
    profiles = []
    for mode in ("sine", "cosine", "alternating", "schroeder"):
        spec = CarrierSpec(f_target=130.0, harmonics=(1, 2, 3, 4, 5), phase_mode=mode)
        mag = np.abs(np.fft.rfft(render_carrier(cents, spec, RATE)))[bins]
        profiles.append(mag / mag[0])
    for p in profiles[1:]:
        np.testing.assert_allclose(p, profiles[0], rtol=1e-3)


def test_aliasing_rejected():
    cents = np.zeros(1000)
    with pytest.raises(ParameterError):
        render_carrier(
            cents, CarrierSpec(f_target=2000.0, harmonics=tuple(range(1, 21))), RATE
        )


def test_amplitude_validation():
    with pytest.raises(ParameterError):
        CarrierSpec(harmonics=(1, 2), amplitudes=(1.0,)).resolved_amplitudes()
    with pytest.raises(ParameterError):
        CarrierSpec(harmonics=(1, 2), amplitudes=(1.0, -1.0)).resolved_amplitudes()
    np.testing.assert_array_equal(
        CarrierSpec(harmonics=(1, 2)).resolved_amplitudes(), [1.0, 1.0]
    )


def test_synthesize_deterministic(small_stimulus):
    again = synthesize(
        small_stimulus.modulation,
        small_stimulus.carrier,
        small_stimulus.rate,
        small_stimulus.orthogonal_set,
    )
    np.testing.assert_array_equal(again.audio, small_stimulus.audio)
    assert np.abs(small_stimulus.audio).max() == pytest.approx(0.99, abs=1e-6)
