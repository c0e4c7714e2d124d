from __future__ import annotations

import numpy as np
import pytest

from pitchprobe.config import MeasurementConfig
from pitchprobe.errors import ConflictError, DataQualityError, PitchprobeError
from pitchprobe.session.store import SessionStore
from pitchprobe.session.wavio import read_wav

SMALL_CONFIG = MeasurementConfig(total_duration=6.0, harmonics=tuple(range(1, 9)))


@pytest.fixture()
def store(tmp_path):
    return SessionStore(root=tmp_path)


@pytest.fixture()
def session(store):
    return store.create_session(config=SMALL_CONFIG, mode="simulated")


def loopback_samples(store, session_id):
    return store.stimulus(session_id).audio


def test_create_session(store, session):
    assert session["status"] == "created"
    assert session["mode"] == "simulated"
    assert session["config"]["total_duration"] == 6.0
    assert (store.root / session["id"] / "stimulus.wav").exists()
    assert store.load(session["id"])["id"] == session["id"]


def test_list_sessions(store, session):
    listed = store.list_sessions()
    assert [s["id"] for s in listed] == [session["id"]]


def test_unknown_session(store):
    with pytest.raises(PitchprobeError, match="unknown session"):
        store.load("nope")


def test_stimulus_wav_matches_config(store, session):
    samples, rate = read_wav(store.stimulus_wav_path(session["id"]))
    assert rate == SMALL_CONFIG.rate
    stim = store.stimulus(session["id"])
    np.testing.assert_allclose(samples, stim.audio, atol=2.0 / (1 << 23))


def test_full_lifecycle(store, session):
    sid = session["id"]
    store.save_recording(sid, loopback_samples(store, sid))
    assert store.load(sid)["status"] == "recorded"
    returned = store.analyze(sid)
    assert returned["schema"] == "pitchprobe.analysis/1"
    assert store.load(sid)["status"] == "analyzed"
    results = store.results(sid)
    assert results["schema"] == "pitchprobe.analysis/1"
    assert results["significant"] is False
    assert results["peak_cents"] > 10.0


def test_analyze_requires_recording(store, session):
    with pytest.raises(ConflictError):
        store.analyze(session["id"])


def test_results_require_analysis(store, session):
    with pytest.raises(ConflictError):
        store.results(session["id"])


def test_recording_frozen_after_analysis(store, session):
    sid = session["id"]
    samples = loopback_samples(store, sid)
    store.save_recording(sid, samples)
    store.analyze(sid)
    with pytest.raises(ConflictError):
        store.save_recording(sid, samples)


def test_config_frozen_after_recording(store, session):
    sid = session["id"]
    store.save_recording(sid, loopback_samples(store, sid))
    with pytest.raises(ConflictError):
        store.update_config(sid, SMALL_CONFIG)


def test_update_config_regenerates(store, session):
    sid = session["id"]
    import dataclasses

    cfg = dataclasses.replace(SMALL_CONFIG, f_target=150.0)
    record = store.update_config(sid, cfg)
    assert record["config"]["f_target"] == 150.0
    assert store.stimulus(sid).carrier.f_target == 150.0


def test_reanalysis_allowed(store, session):
    sid = session["id"]
    store.save_recording(sid, loopback_samples(store, sid))
    store.analyze(sid)
    store.analyze(sid)  # re-run, e.g. with a different anchor
    ops = [e["op"] for e in store.read_log()]
    assert ops == ["save", "analyze", "analyze"]


def test_log_entries(store, session):
    sid = session["id"]
    assert store.read_log() == []  # creation is not logged
    store.save_recording(sid, loopback_samples(store, sid))
    store.analyze(sid)
    log = store.read_log()
    assert [e["op"] for e in log] == ["save", "analyze"]
    for entry in log:
        assert entry["session"] == sid
        assert len(entry["sha256"]) == 64
        assert entry["schema"] == "pitchprobe.log/1"


def test_stimulus_regeneration_bit_identical(store, session, tmp_path):
    # a second store over the same root rebuilds the stimulus from config
    # and must produce the very same file content
    sid = session["id"]
    first = store.stimulus_wav_path(sid).read_bytes()
    other = SessionStore(root=store.root)
    regen = other.stimulus(sid)
    from pitchprobe.session.wavio import wav_bytes

    assert wav_bytes(regen.audio, SMALL_CONFIG.rate) == first


def test_calibration_offset_roundtrip(store, session):
    assert store.calibration_offset() == 0.0
    store.set_calibration_offset(12.5)
    assert store.calibration_offset() == 12.5
    # new sessions pick the stored offset up
    fresh = store.create_session(config=SMALL_CONFIG)
    assert fresh["clock_offset_samples"] == 12.5


def test_measured_offset(store, session):
    sid = session["id"]
    samples = loopback_samples(store, sid)
    delayed = np.concatenate([np.zeros(120), samples])
    store.save_recording(sid, delayed)
    measured = store.measure_calibration_offset(sid)
    assert measured == pytest.approx(120.0, abs=0.1)
    assert store.load(sid)["clock_offset_samples"] == pytest.approx(120.0, abs=0.1)
    # analysis applies the offset, so the loopback still lines up
    store.analyze(sid)
    results = store.results(sid)
    assert results["peak_cents"] > 10.0


def test_clock_offset_frozen_after_analysis(store, session):
    sid = session["id"]
    store.save_recording(sid, loopback_samples(store, sid))
    store.set_clock_offset(sid, 3.0)
    store.analyze(sid)
    with pytest.raises(ConflictError):
        store.set_clock_offset(sid, 4.0)


def test_short_recording_rejected(store, session):
    with pytest.raises(DataQualityError):
        store.save_recording(session["id"], np.zeros(10))
