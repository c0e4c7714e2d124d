"""Wiring between serialized session parameters and the signal layer."""

from __future__ import annotations

import numpy as np

from ..config import MeasurementConfig
from ..modgen import design_window, make_modulation
from ..orthoseq import build_orthogonal_set
from ..stimsynth import CarrierSpec, TestStimulus, synthesize
from ..subjsim import SubjectModel, simulate_subject
from ..sysresp import AveragedResponse, ResponseEstimate, analyze_session

ANALYSIS_SCHEMA = "pitchprobe.analysis/1"
AVERAGE_SCHEMA = "pitchprobe.average/1"
PLOT_DECIMATION = 16


def generate_stimulus(config: MeasurementConfig) -> TestStimulus:
    """Deterministically render the stimulus a config describes."""
    oset, mixsig = build_orthogonal_set(
        config.seeds,
        config.t_r,
        config.total_duration,
        config.rate,
        tsp_duration=config.tsp_duration,
    )
    window = design_window(config.smoothing_length)
    mod = make_modulation(
        mixsig, window, config.modulation_sd, config.rate, config.t_r
    )
    carrier = CarrierSpec(
        f_target=config.f_target,
        harmonics=config.harmonics,
        phase_mode=config.phase_mode,
        phase_seed=config.phase_seed,
    )
    return synthesize(mod, carrier, config.rate, oset)


def simulate_recording(
    stimulus: TestStimulus, model: SubjectModel, seed: int
) -> np.ndarray:
    return simulate_subject(stimulus, model, seed)


def analyze_pair(
    stimulus: TestStimulus,
    recording: np.ndarray,
    offset_samples: float = 0.0,
    recording_anchor: int = 1,
    session_id: str | None = None,
) -> ResponseEstimate:
    """Align a recording to the stimulus clock and analyze it."""
    k = int(round(offset_samples))
    if k > 0:
        # the first k samples predate the stimulus; what fell off the far
        # end only touches the last cycle, which the estimator discards
        recording = np.concatenate([recording[k:], np.zeros(k)])
    elif k < 0:
        recording = np.concatenate([np.zeros(-k), recording])
    return analyze_session(
        stimulus,
        recording,
        recording_anchor=recording_anchor,
        session_id=session_id,
    )


def _decimate(x: np.ndarray) -> list[float]:
    return np.asarray(x, float)[::PLOT_DECIMATION].tolist()


def estimate_to_dict(est: ResponseEstimate) -> dict:
    return {
        "schema": ANALYSIS_SCHEMA,
        "session_id": est.session_id,
        "rate": est.rate,
        "t_r": est.t_r,
        "f_target": est.f_target,
        "seeds": list(est.seeds),
        "n_cycles": est.n_cycles,
        "residual_level": est.residual_level,
        "peak_cents": est.peak_cents,
        "latency_ms": est.latency_ms,
        "significant": est.significant,
        "plot_decimation": PLOT_DECIMATION,
        "time_axis": _decimate(est.time_axis),
        "perturbation_pulse": _decimate(est.perturbation_pulse),
        "response": _decimate(est.response),
        "residual": _decimate(est.residual),
    }


def averaged_to_dict(avg: AveragedResponse) -> dict:
    return {
        "schema": AVERAGE_SCHEMA,
        "rate": avg.rate,
        "t_r": avg.t_r,
        "f_target": avg.f_target,
        "n_sessions": avg.n_sessions,
        "residual_level": avg.residual_level,
        "latency_ms": avg.latency_ms,
        "significant": avg.significant,
        "plot_decimation": PLOT_DECIMATION,
        "time_axis": _decimate(avg.time_axis),
        "perturbation_pulse": _decimate(avg.perturbation_pulse),
        "response": _decimate(avg.response),
        "random_mean": _decimate(avg.random_mean),
    }
