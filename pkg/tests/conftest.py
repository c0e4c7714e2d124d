"""Shared fixtures.

The full-length default stimulus and the two analyses derived from it are
expensive (a couple of seconds together), so they are built once per test
session. Fast unit tests construct their own small sets instead.
"""

from __future__ import annotations

import pytest

from pitchprobe.config import MeasurementConfig
from pitchprobe.session import pipeline
from pitchprobe.subjsim import SubjectModel, loopback_channel, simulate_subject
from pitchprobe.sysresp import analyze_session

# small enough to keep store/service/CLI tests quick, large enough for the
# interior-cycle average to exist (16 allocations -> 4 cycles)
SMALL_CONFIG = MeasurementConfig(total_duration=6.0, harmonics=tuple(range(1, 9)))


@pytest.fixture(scope="session")
def default_stimulus():
    return pipeline.generate_stimulus(MeasurementConfig())


@pytest.fixture(scope="session")
def small_stimulus():
    return pipeline.generate_stimulus(SMALL_CONFIG)


@pytest.fixture(scope="session")
def loopback_estimate(default_stimulus):
    rec = loopback_channel(default_stimulus.audio, 0.006, default_stimulus.rate)
    return analyze_session(default_stimulus, rec)


@pytest.fixture(scope="session")
def subject_estimate(default_stimulus):
    rec = simulate_subject(default_stimulus, SubjectModel(), seed=12345)
    return analyze_session(default_stimulus, rec, session_id="unit-subject")
