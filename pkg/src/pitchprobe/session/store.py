"""On-disk session store: one directory per session, JSON sidecars, and an
append-only JSONL operation log.

State machine per session: created -> recorded -> analyzed. Saving after
analysis, analyzing before a recording exists, and concurrent mutation all
raise ConflictError. Analysis regenerates the stimulus from the stored
parameters instead of decoding the 24-bit file, so the reference trace
carries no quantization noise.
"""

from __future__ import annotations

import hashlib
import json
import os
import secrets
import threading
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from ..config import MeasurementConfig
from ..errors import ConflictError, DataQualityError, ParameterError
from ..stimsynth import TestStimulus
from . import pipeline, wavio
from .calibration import measure_clock_offset

SESSION_SCHEMA = "pitchprobe.session/1"
LOG_SCHEMA = "pitchprobe.log/1"
DATA_ROOT_ENV = "PITCHPROBE_DATA_ROOT"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


def default_root() -> Path:
    env = os.environ.get(DATA_ROOT_ENV)
    if env:
        return Path(env)
    return Path.home() / ".pitchprobe"


class SessionStore:
    def __init__(self, root: str | Path | None = None):
        self.root = Path(root) if root is not None else default_root()
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self._stimuli: dict[str, TestStimulus] = {}

    # ------------------------------------------------------------- locking

    def _lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def _acquire(self, session_id: str) -> threading.Lock:
        lock = self._lock(session_id)
        if not lock.acquire(blocking=False):
            raise ConflictError("session is being modified by another operation")
        return lock

    # ----------------------------------------------------------- records

    def _dir(self, session_id: str) -> Path:
        d = self.root / session_id
        if not d.is_dir():
            raise ParameterError(f"unknown session {session_id!r}")
        return d

    def _write_record(self, record: dict) -> None:
        d = self.root / record["id"]
        tmp = d / "session.json.tmp"
        tmp.write_text(json.dumps(record, indent=2))
        tmp.replace(d / "session.json")

    def load(self, session_id: str) -> dict:
        return json.loads((self._dir(session_id) / "session.json").read_text())

    def list_sessions(self) -> list[dict]:
        records = []
        for p in self.root.iterdir():
            if p.is_dir() and (p / "session.json").is_file():
                records.append(json.loads((p / "session.json").read_text()))
        records.sort(key=lambda r: r["created_at"])
        return records

    # ---------------------------------------------------------- lifecycle

    def create_session(
        self, config: MeasurementConfig | None = None, mode: str = "live"
    ) -> dict:
        config = config or MeasurementConfig()
        session_id = (
            datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S")
            + "-"
            + secrets.token_hex(3)
        )
        d = self.root / session_id
        d.mkdir(parents=True)
        stimulus = pipeline.generate_stimulus(config)
        wavio.write_wav(d / "stimulus.wav", stimulus.audio, config.rate)
        self._stimuli[session_id] = stimulus
        record = {
            "schema": SESSION_SCHEMA,
            "id": session_id,
            "created_at": _now(),
            "status": "created",
            "mode": mode,
            "config": config.to_dict(),
            "clock_offset_samples": self.calibration_offset(),
            "overruns": 0,
        }
        self._write_record(record)
        return record

    def update_config(self, session_id: str, config: MeasurementConfig) -> dict:
        lock = self._acquire(session_id)
        try:
            record = self.load(session_id)
            if record["status"] != "created":
                raise ConflictError("config is frozen once a recording exists")
            d = self._dir(session_id)
            stimulus = pipeline.generate_stimulus(config)
            wavio.write_wav(d / "stimulus.wav", stimulus.audio, config.rate)
            self._stimuli[session_id] = stimulus
            record["config"] = config.to_dict()
            self._write_record(record)
            return record
        finally:
            lock.release()

    def stimulus(self, session_id: str) -> TestStimulus:
        if session_id not in self._stimuli:
            record = self.load(session_id)
            self._stimuli[session_id] = pipeline.generate_stimulus(
                MeasurementConfig.from_dict(record["config"])
            )
        return self._stimuli[session_id]

    def stimulus_wav_path(self, session_id: str) -> Path:
        return self._dir(session_id) / "stimulus.wav"

    def save_recording(
        self, session_id: str, samples: np.ndarray, overruns: int = 0
    ) -> dict:
        lock = self._acquire(session_id)
        try:
            record = self.load(session_id)
            if record["status"] == "analyzed":
                raise ConflictError("session already analyzed; recording is frozen")
            cfg = record["config"]
            if len(samples) < round(cfg["total_duration"] * cfg["rate"]):
                raise DataQualityError("recording is shorter than the stimulus")
            d = self._dir(session_id)
            blob = wavio.wav_bytes(samples, cfg["rate"])
            (d / "recording.wav").write_bytes(blob)
            record["status"] = "recorded"
            record["overruns"] = int(overruns)
            self._write_record(record)
            self._log("save", session_id, blob)
            return record
        finally:
            lock.release()

    def analyze(self, session_id: str, recording_anchor: int = 1) -> dict:
        lock = self._acquire(session_id)
        try:
            record = self.load(session_id)
            if record["status"] == "created":
                raise ConflictError("no recording saved for this session yet")
            d = self._dir(session_id)
            recording, rate = wavio.read_wav(d / "recording.wav")
            if rate != record["config"]["rate"]:
                raise ParameterError("recording rate does not match the session")
            est = pipeline.analyze_pair(
                self.stimulus(session_id),
                recording,
                offset_samples=record.get("clock_offset_samples", 0.0),
                recording_anchor=recording_anchor,
                session_id=session_id,
            )
            result = pipeline.estimate_to_dict(est)
            blob = json.dumps(result, indent=2).encode()
            (d / "analysis.json").write_bytes(blob)
            record["status"] = "analyzed"
            self._write_record(record)
            self._log("analyze", session_id, blob)
            return result
        finally:
            lock.release()

    def results(self, session_id: str) -> dict:
        path = self._dir(session_id) / "analysis.json"
        if not path.is_file():
            raise ConflictError("session has not been analyzed")
        return json.loads(path.read_text())

    # -------------------------------------------------------- calibration

    def calibration_offset(self) -> float:
        path = self.root / "calibration.json"
        if path.is_file():
            return float(json.loads(path.read_text())["offset_samples"])
        return 0.0

    def set_calibration_offset(self, offset_samples: float) -> None:
        path = self.root / "calibration.json"
        path.write_text(
            json.dumps({"schema": "pitchprobe.calibration/1",
                        "offset_samples": float(offset_samples)}, indent=2)
        )

    def measure_calibration_offset(self, session_id: str) -> float:
        """Cross-correlate a loopback session's recording against its own
        stimulus, store the offset, and stamp it on the session."""
        record = self.load(session_id)
        if record["status"] == "created":
            raise ConflictError("loopback calibration needs a saved recording")
        recording, _ = wavio.read_wav(self._dir(session_id) / "recording.wav")
        stimulus = self.stimulus(session_id)
        offset = measure_clock_offset(
            stimulus.audio, recording, record["config"]["rate"]
        )
        self.set_calibration_offset(offset)
        record["clock_offset_samples"] = offset
        self._write_record(record)
        return offset

    def set_clock_offset(self, session_id: str, offset_samples: float) -> dict:
        lock = self._acquire(session_id)
        try:
            record = self.load(session_id)
            if record["status"] == "analyzed":
                raise ConflictError("clock offset is frozen after analysis")
            record["clock_offset_samples"] = float(offset_samples)
            self._write_record(record)
            return record
        finally:
            lock.release()

    # ---------------------------------------------------------------- log

    def _log(self, op: str, session_id: str, payload: bytes) -> None:
        entry = {
            "schema": LOG_SCHEMA,
            "ts": _now(),
            "op": op,
            "session": session_id,
            "sha256": hashlib.sha256(payload).hexdigest(),
        }
        with (self.root / "operations.log").open("a") as fh:
            fh.write(json.dumps(entry) + "\n")

    def read_log(self) -> list[dict]:
        path = self.root / "operations.log"
        if not path.is_file():
            return []
        return [json.loads(line) for line in path.read_text().splitlines() if line]
