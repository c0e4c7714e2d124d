"""Involuntary pitch-response measurement with orthogonal pulse sequences.

The pipeline: CAPRICEP unit pulses -> Walsh-signed allocation ->
smoothed cents modulation -> FM carrier -> instantaneous-frequency
tracking -> correlation-cancelling recovery of perturbation, response,
and residual.
"""

from .capricep import UnitTsp, generate_unit_tsp
from .config import MeasurementConfig
from .errors import (
    ConflictError,
    DataQualityError,
    ParameterError,
    PitchprobeError,
    StreamOverrunError,
)
from .f0track import AnalyticFilter, F0Trajectory, design_analytic_filter, extract_f0, hz_to_cents
from .modgen import CosineSeriesWindow, ModulationSignal, design_window, make_modulation
from .orthoseq import OrthogonalSet, RecoveredPulses, build_orthogonal_set, recover_pulses
from .stimsynth import CarrierSpec, TestStimulus, synthesize
from .subjsim import SubjectModel, loopback_channel, simulate_subject
from .sysresp import (
    AveragedResponse,
    ResponseEstimate,
    analyze_session,
    average_sessions,
    measure_latency,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticFilter",
    "AveragedResponse",
    "CarrierSpec",
    "ConflictError",
    "CosineSeriesWindow",
    "DataQualityError",
    "F0Trajectory",
    "MeasurementConfig",
    "ModulationSignal",
    "OrthogonalSet",
    "ParameterError",
    "PitchprobeError",
    "RecoveredPulses",
    "ResponseEstimate",
    "StreamOverrunError",
    "SubjectModel",
    "TestStimulus",
    "UnitTsp",
    "analyze_session",
    "average_sessions",
    "build_orthogonal_set",
    "design_analytic_filter",
    "design_window",
    "extract_f0",
    "generate_unit_tsp",
    "hz_to_cents",
    "loopback_channel",
    "make_modulation",
    "measure_latency",
    "recover_pulses",
    "simulate_subject",
    "synthesize",
    "__version__",
]
