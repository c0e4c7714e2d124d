"""Response recovery from a recorded session.

Both the stimulus and the recording are tracked to cents traces, the
recording trace is mean-removed cycle by cycle to shed slow drift, and both
are projected through the orthogonal polarity schedule. The fourth Walsh
row never carries a deterministic contribution from the first two
sequences, so its projection through those channels estimates the
response-free residual floor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataQualityError, ParameterError
from .f0track import design_analytic_filter, extract_f0
from .orthoseq import own_projection, recover_pulses, residual_projection
from .stimsynth import TestStimulus

MAX_LATENCY_S = 0.5
SIGNIFICANCE_FACTOR = 3.0


@dataclass(frozen=True, eq=False)
class ResponseEstimate:
    time_axis: np.ndarray = field(repr=False)
    perturbation_pulse: np.ndarray = field(repr=False)
    response: np.ndarray = field(repr=False)
    residual: np.ndarray = field(repr=False)
    residual_level: float
    peak_cents: float
    latency_ms: float | None
    significant: bool
    rate: int
    t_r: int
    f_target: float
    seeds: tuple[int, ...]
    n_cycles: int
    session_id: str | None = None


@dataclass(frozen=True, eq=False)
class AveragedResponse:
    time_axis: np.ndarray = field(repr=False)
    perturbation_pulse: np.ndarray = field(repr=False)
    response: np.ndarray = field(repr=False)
    random_mean: np.ndarray = field(repr=False)
    residual_level: float
    latency_ms: float | None
    significant: bool
    rate: int
    t_r: int
    f_target: float
    n_sessions: int


def _parabolic_offset(y: np.ndarray, i: int) -> float:
    """Sub-sample peak offset from three points around index i."""
    if i <= 0 or i >= len(y) - 1:
        return 0.0
    denom = y[i - 1] - 2.0 * y[i] + y[i + 1]
    if denom == 0.0:
        return 0.0
    return float(np.clip(0.5 * (y[i - 1] - y[i + 1]) / denom, -1.0, 1.0))


def _find_latency(
    pert: np.ndarray,
    resp: np.ndarray,
    residual_level: float,
    rate: int,
) -> tuple[float | None, bool]:
    p0 = int(np.argmax(np.abs(pert)))
    sign = 1.0 if pert[p0] >= 0.0 else -1.0
    hi = min(len(resp), p0 + 1 + int(round(MAX_LATENCY_S * rate)))
    if hi <= p0 + 1:
        return None, False
    window = -sign * resp[p0 + 1 : hi]
    rel = int(np.argmax(window))
    idx = p0 + 1 + rel
    if window[rel] <= SIGNIFICANCE_FACTOR * residual_level:
        return None, False
    frac = _parabolic_offset(-sign * resp, idx)
    latency_ms = (idx + frac - p0) / rate * 1000.0
    return float(latency_ms), True


def measure_latency(
    estimate: ResponseEstimate | AveragedResponse,
) -> tuple[float | None, bool]:
    """Latency of the first significant opposite-sign extremum, in ms.

    Significance requires the extremum to clear three times the residual
    floor; otherwise (None, False) is returned.
    """
    return _find_latency(
        estimate.perturbation_pulse,
        estimate.response,
        estimate.residual_level,
        estimate.rate,
    )


def measure_pulse_delay(estimate: ResponseEstimate | AveragedResponse) -> float:
    """Circular lag (ms) of the response relative to the perturbation pulse."""
    n = len(estimate.perturbation_pulse)
    xc = np.fft.irfft(
        np.fft.rfft(estimate.response) * np.conj(np.fft.rfft(estimate.perturbation_pulse)),
        n,
    )
    i = int(np.argmax(xc))
    frac = _parabolic_offset(np.roll(xc, n // 2), (i + n // 2) % n)
    lag = i if i <= n // 2 else i - n
    return (lag + frac) / estimate.rate * 1000.0


def analyze_session(
    stimulus: TestStimulus,
    recording: np.ndarray,
    recording_anchor: int = 1,
    session_id: str | None = None,
) -> ResponseEstimate:
    """Recover perturbation, response, and residual pulses from one session.

    recording_anchor selects the harmonic the recording is tracked on, for
    voices whose spectrum does not include the fundamental.
    """
    oset = stimulus.orthogonal_set
    rate = stimulus.rate
    n = len(stimulus.audio)
    if len(recording) < n:
        raise DataQualityError("recording shorter than the stimulus")
    recording = np.asarray(recording, float)[:n]

    f_target = stimulus.carrier.f_target
    stim_filter = design_analytic_filter(
        f_target, rate, anchor=min(stimulus.carrier.harmonics)
    )
    rec_filter = design_analytic_filter(f_target, rate, anchor=recording_anchor)

    pert = extract_f0(stimulus.audio, stim_filter)
    resp = extract_f0(recording, rec_filter)
    if np.mean(resp.valid) < 0.5:
        raise DataQualityError("recording is mostly silent or untrackable")

    # detrend each cycle so slow drift cannot ride into the projections
    # through the all-ones Walsh row, which passes any component that varies
    # little across the four slots
    resp_cents = resp.cents.copy()
    cycle = oset.cycle
    n_full = n // cycle
    ramp = np.linspace(-1.0, 1.0, cycle)
    denom = float(np.dot(ramp, ramp))
    for k in range(n_full):
        seg = resp_cents[k * cycle : (k + 1) * cycle]
        seg -= seg.mean() + np.dot(ramp, seg) / denom * ramp
    if n_full * cycle < n:
        tail = resp_cents[n_full * cycle :]
        tail -= tail.mean()

    rec_pert = recover_pulses(pert.cents, oset)
    rec_resp = recover_pulses(resp_cents, oset)

    pert_pulse = np.mean(
        [own_projection(rec_pert, k) for k in range(3)], axis=0
    )
    resp_pulse = np.mean(
        [own_projection(rec_resp, k) for k in range(3)], axis=0
    )

    residual = residual_projection(rec_resp)
    residual_level = float(np.sqrt(np.mean(residual**2)))

    shift = oset.t_r // 2
    pert_pulse = np.roll(pert_pulse, shift)
    resp_pulse = np.roll(resp_pulse, shift)
    residual = np.roll(residual, shift)
    time_axis = (np.arange(cycle) - shift) / rate

    latency_ms, significant = _find_latency(
        pert_pulse, resp_pulse, residual_level, rate
    )
    return ResponseEstimate(
        time_axis=time_axis,
        perturbation_pulse=pert_pulse,
        response=resp_pulse,
        residual=residual,
        residual_level=residual_level,
        peak_cents=float(pert_pulse.max()),
        latency_ms=latency_ms,
        significant=significant,
        rate=rate,
        t_r=oset.t_r,
        f_target=f_target,
        seeds=oset.seeds,
        n_cycles=rec_resp.n_cycles,
        session_id=session_id,
    )


def average_sessions(estimates: Sequence[ResponseEstimate]) -> AveragedResponse:
    """Average per-session estimates taken with distinct pulse seed sets."""
    if not estimates:
        raise ParameterError("no sessions to average")
    first = estimates[0]
    for est in estimates[1:]:
        if (est.rate, est.t_r, est.f_target) != (
            first.rate,
            first.t_r,
            first.f_target,
        ):
            raise ParameterError("sessions use incompatible configurations")
    seed_sets = [tuple(sorted(est.seeds)) for est in estimates]
    if len(set(seed_sets)) != len(seed_sets):
        raise ParameterError("sessions must use distinct seed sets")

    response = np.mean([est.response for est in estimates], axis=0)
    pert = np.mean([est.perturbation_pulse for est in estimates], axis=0)
    random_mean = np.mean([est.residual for est in estimates], axis=0)
    residual_level = float(np.sqrt(np.mean(random_mean**2)))
    latency_ms, significant = _find_latency(
        pert, response, residual_level, first.rate
    )
    return AveragedResponse(
        time_axis=first.time_axis.copy(),
        perturbation_pulse=pert,
        response=response,
        random_mean=random_mean,
        residual_level=residual_level,
        latency_ms=latency_ms,
        significant=significant,
        rate=first.rate,
        t_r=first.t_r,
        f_target=first.f_target,
        n_sessions=len(estimates),
    )
