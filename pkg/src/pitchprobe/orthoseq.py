"""Orthogonal pulse sequences and correlation-cancelling recovery.

Three unit pulses are allocated every t_r samples with per-allocation signs
taken from Walsh rows; matched filtering plus Walsh-weighted cyclic
averaging separates the simultaneous responses. The fourth Walsh row, used
by no sequence, estimates the random residual.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .capricep import UnitTsp, generate_unit_tsp
from .errors import ParameterError

# rows 1-3 drive the sequences; row 4 is the residual probe
WALSH = np.array(
    [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ]
)


@dataclass(frozen=True, eq=False)
class OrthogonalSet:
    tsps: tuple[UnitTsp, UnitTsp, UnitTsp]
    t_r: int
    total_duration: float
    rate: int

    @property
    def polarity(self) -> np.ndarray:
        """3x4 sign matrix, one row per sequence."""
        return WALSH[:3].copy()

    @property
    def cycle(self) -> int:
        return 4 * self.t_r

    @property
    def seeds(self) -> tuple[int, int, int]:
        return tuple(t.seed for t in self.tsps)  # type: ignore[return-value]


@dataclass(frozen=True, eq=False)
class MixSignal:
    mix: np.ndarray = field(repr=False)
    per_sequence: np.ndarray = field(repr=False)  # shape (3, n)
    allocation_count: int


@dataclass(frozen=True, eq=False)
class RecoveredPulses:
    """Walsh projections per channel: projections[k, r] is channel k's
    matched-filter output averaged with Walsh row r, folded to one cycle."""

    projections: np.ndarray = field(repr=False)  # shape (3, 4, cycle)
    n_cycles: int
    t_r: int


def build_orthogonal_set(
    seeds: tuple[int, int, int],
    t_r: int,
    total_duration: float,
    rate: int,
    tsp_duration: float = 0.4,
) -> tuple[OrthogonalSet, MixSignal]:
    if len(set(seeds)) != 3:
        raise ParameterError("the three sequence seeds must be distinct")
    if t_r <= 0:
        raise ParameterError("t_r must be positive")
    total = int(round(total_duration * rate))
    n_alloc = total // t_r
    if n_alloc < 8:
        raise ParameterError("total duration must cover at least 8 allocations")

    tsps = tuple(
        generate_unit_tsp(s, nominal_duration=tsp_duration, rate=rate) for s in seeds
    )
    if t_r < tsps[0].length * 0.9:
        raise ParameterError("t_r too short: allocations would overlap beyond neighbors")

    per_sequence = np.zeros((3, total))
    for k in range(3):
        pulse = tsps[k].samples
        for j in range(n_alloc):
            a = j * t_r
            b = min(a + len(pulse), total)
            per_sequence[k, a:b] += WALSH[k, j % 4] * pulse[: b - a]

    oset = OrthogonalSet(
        tsps=tsps, t_r=t_r, total_duration=total_duration, rate=rate
    )
    mixsig = MixSignal(
        mix=per_sequence.sum(axis=0),
        per_sequence=per_sequence,
        allocation_count=n_alloc,
    )
    return oset, mixsig


def matched_filter(trace: np.ndarray, tsp: UnitTsp) -> np.ndarray:
    """Cross-correlate with the unit pulse, energy-normalized.

    Output index n holds the correlation of trace[n : n+L] with the pulse,
    so a pulse allocated at origin n compresses to a peak at n.
    """
    y = fftconvolve(trace, tsp.samples[::-1])
    return y[tsp.length - 1 : tsp.length - 1 + len(trace)] / tsp.energy


def recover_pulses(signal: np.ndarray, oset: OrthogonalSet) -> RecoveredPulses:
    """Matched-filter `signal` with each unit pulse and project on all four
    Walsh rows over interior cycles."""
    cycle = oset.cycle
    n_cycles = len(signal) // cycle
    if n_cycles < 2:
        raise ParameterError("signal shorter than two polarity cycles")

    projections = np.zeros((3, 4, cycle))
    for k in range(3):
        y = matched_filter(signal, oset.tsps[k])
        segments = y[: n_cycles * cycle].reshape(n_cycles, cycle)
        interior = segments[1:-1] if n_cycles > 2 else segments
        ybar = interior.mean(axis=0)
        for r in range(4):
            acc = np.zeros(cycle)
            for slot in range(4):
                acc += WALSH[r, slot] * np.roll(ybar, -slot * oset.t_r)
            projections[k, r] = acc / 4.0
    return RecoveredPulses(
        projections=projections, n_cycles=max(1, n_cycles - 2), t_r=oset.t_r
    )


def own_projection(rec: RecoveredPulses, k: int) -> np.ndarray:
    """Channel k's own-polarity projection (contains its recovered pulse)."""
    return rec.projections[k, k]


def residual_projection(rec: RecoveredPulses) -> np.ndarray:
    """Fourth-row estimate of the residual, channels 1 and 2 only.

    Channel 3 is excluded because Walsh row 4 is a cyclic shift of row 3,
    which would put shifted copies of that channel's own response here. The
    remaining rows still pick up pulse cross-correlation noise scaled by
    the recovered signal (row 4 correlates with row 3 at lags +-t_r), so
    this level reads deliberately conservative when a response is present.
    """
    return rec.projections[:2, 3].mean(axis=0)
