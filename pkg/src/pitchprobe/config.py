"""Default measurement configuration.

All numbers the rest of the package treats as defaults live here so a
session's JSON sidecar can reproduce any signal bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

RATE = 44100
BIT_DEPTH = 24
T_R = 16384                  # allocation interval, samples (371.5 ms at 44100)
TOTAL_DURATION = 20.0        # seconds
F_TARGET = 130.0             # Hz
MODULATION_SD = 25.0         # cents
SMOOTHING_LENGTH = T_R // 4  # modulation smoother, samples

TSP_DURATION = 0.4           # nominal unit pulse length, seconds
TSP_WRAPS = 20
TSP_STAGES = 64
TSP_FIELD_RMS = 0.35
TSP_WIDTH_SCALE = 0.30
TSP_WIDTH_FLOOR = 0.02

DEFAULT_SEEDS = (73, 83, 149)

# eight screened seed triples for multi-session runs (first = default session)
SESSION_SEED_SETS = (
    (73, 83, 149),
    (6, 146, 177),
    (36, 94, 210),
    (39, 62, 211),
    (4, 42, 79),
    (23, 116, 201),
    (5, 17, 145),
    (7, 8, 126),
)

DEFAULT_HARMONICS = tuple(range(1, 21))


@dataclass(frozen=True)
class MeasurementConfig:
    """One session's generation parameters."""

    rate: int = RATE
    t_r: int = T_R
    total_duration: float = TOTAL_DURATION
    f_target: float = F_TARGET
    modulation_sd: float = MODULATION_SD
    smoothing_length: int = SMOOTHING_LENGTH
    seeds: tuple[int, int, int] = DEFAULT_SEEDS
    harmonics: tuple[int, ...] = DEFAULT_HARMONICS
    phase_mode: str = "sine"
    phase_seed: int | None = None
    tsp_duration: float = TSP_DURATION

    def to_dict(self) -> dict:
        return {
            "rate": self.rate,
            "t_r": self.t_r,
            "total_duration": self.total_duration,
            "f_target": self.f_target,
            "modulation_sd": self.modulation_sd,
            "smoothing_length": self.smoothing_length,
            "seeds": list(self.seeds),
            "harmonics": list(self.harmonics),
            "phase_mode": self.phase_mode,
            "phase_seed": self.phase_seed,
            "tsp_duration": self.tsp_duration,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MeasurementConfig":
        kw = dict(d)
        if "seeds" in kw:
            kw["seeds"] = tuple(kw["seeds"])
        if "harmonics" in kw:
            kw["harmonics"] = tuple(kw["harmonics"])
        return cls(**kw)
