"""HTTP/WebSocket measurement service.

Capture protocol: the client streams binary frames over the capture
socket, each frame an 8-byte little-endian uint64 first-sample index
followed by float32 PCM. Sample indexing lets the server detect dropped
blocks (reported as overruns) without trusting wall-clock timing.
"""

from __future__ import annotations

import asyncio
import struct
from dataclasses import dataclass, field

import numpy as np
from fastapi import Body, FastAPI, Query, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, Response

from ..config import MeasurementConfig
from ..errors import ConflictError, ParameterError, PitchprobeError
from . import wavio
from .calibration import dbfs, pink_noise
from .store import SessionStore

API = "/api/v1"
METER_WINDOW_S = 0.1


@dataclass
class CaptureBuffer:
    rate: int
    frames: dict[int, np.ndarray] = field(default_factory=dict)
    expected_next: int = 0
    overruns: int = 0

    def add(self, index: int, samples: np.ndarray) -> None:
        if index > self.expected_next:
            self.overruns += 1
        self.frames[index] = samples
        self.expected_next = max(self.expected_next, index + len(samples))

    def assemble(self) -> np.ndarray:
        if not self.frames:
            return np.zeros(0)
        out = np.zeros(self.expected_next)
        for index, samples in sorted(self.frames.items()):
            out[index : index + len(samples)] = samples
        return out

    def tail_level(self) -> float:
        """Meter value over the most recent ~100 ms of captured audio."""
        want = max(1, int(self.rate * METER_WINDOW_S))
        got: list[np.ndarray] = []
        total = 0
        for index in sorted(self.frames, reverse=True):
            got.append(self.frames[index])
            total += len(self.frames[index])
            if total >= want:
                break
        if not got:
            return -120.0
        tail = np.concatenate(got[::-1])[-want:]
        return dbfs(tail)


def _parse_frame(blob: bytes) -> tuple[int, np.ndarray]:
    if len(blob) < 8 or (len(blob) - 8) % 4:
        raise ParameterError("malformed capture frame")
    (index,) = struct.unpack("<Q", blob[:8])
    return index, np.frombuffer(blob[8:], "<f4").astype(float)


def create_app(
    store: SessionStore | None = None, ui_dir: str | None = None
) -> FastAPI:
    app = FastAPI(title="pitchprobe")
    app.state.store = store or SessionStore()
    app.state.buffers = {}

    def _store() -> SessionStore:
        return app.state.store

    @app.exception_handler(ConflictError)
    async def _conflict(request, exc):
        return JSONResponse({"detail": str(exc)}, status_code=409)

    @app.exception_handler(PitchprobeError)
    async def _bad_request(request, exc):
        code = 404 if "unknown session" in str(exc) else 400
        return JSONResponse({"detail": str(exc)}, status_code=code)

    # ------------------------------------------------------------ sessions

    @app.post(API + "/sessions", status_code=201)
    def create_session(body: dict = Body(default={})):
        overrides = body.get("config") or {}
        config = MeasurementConfig.from_dict(
            {**MeasurementConfig().to_dict(), **overrides}
        )
        return _store().create_session(config, mode=body.get("mode", "live"))

    @app.get(API + "/sessions")
    def list_sessions():
        return _store().list_sessions()

    @app.get(API + "/sessions/{session_id}")
    def get_session(session_id: str):
        record = _store().load(session_id)
        buf = app.state.buffers.get(session_id)
        if buf is not None:
            record = {**record, "capturing": True, "overruns": buf.overruns}
        return record

    @app.put(API + "/sessions/{session_id}/config")
    def put_config(session_id: str, body: dict = Body(...)):
        if session_id in app.state.buffers:
            raise ConflictError("capture in progress; config is locked")
        record = _store().load(session_id)
        overrides = body.get("config", body)
        config = MeasurementConfig.from_dict({**record["config"], **overrides})
        return _store().update_config(session_id, config)

    @app.get(API + "/sessions/{session_id}/stimulus.wav")
    def stimulus_wav(session_id: str):
        blob = _store().stimulus_wav_path(session_id).read_bytes()
        return Response(blob, media_type="audio/wav")

    # ------------------------------------------------------------- capture

    @app.post(API + "/sessions/{session_id}/start")
    def start_capture(session_id: str):
        record = _store().load(session_id)
        if record["status"] == "analyzed":
            raise ConflictError("session already analyzed")
        app.state.buffers[session_id] = CaptureBuffer(rate=record["config"]["rate"])
        return {
            "capture": f"{API}/sessions/{session_id}/capture",
            "meter": f"{API}/sessions/{session_id}/meter",
        }

    @app.websocket(API + "/sessions/{session_id}/capture")
    async def capture(websocket: WebSocket, session_id: str):
        await websocket.accept()
        buf = app.state.buffers.get(session_id)
        if buf is None:
            await websocket.close(code=4009, reason="capture not started")
            return
        try:
            while True:
                blob = await websocket.receive_bytes()
                index, samples = _parse_frame(blob)
                buf.add(index, samples)
        except WebSocketDisconnect:
            pass

    @app.post(API + "/sessions/{session_id}/save")
    def save(session_id: str):
        buf = app.state.buffers.pop(session_id, None)
        if buf is None or not buf.frames:
            raise ConflictError("no captured audio to save")
        samples = buf.assemble()
        return _store().save_recording(session_id, samples, overruns=buf.overruns)

    @app.get(API + "/sessions/{session_id}/meter")
    def meter(session_id: str):
        buf = app.state.buffers.get(session_id)
        if buf is None:
            raise ConflictError("capture not started")
        return {"dbfs": buf.tail_level(), "overruns": buf.overruns}

    @app.websocket(API + "/sessions/{session_id}/meter/stream")
    async def meter_stream(websocket: WebSocket, session_id: str):
        await websocket.accept()
        try:
            while True:
                buf = app.state.buffers.get(session_id)
                if buf is None:
                    await websocket.close(code=4009, reason="capture not started")
                    return
                await websocket.send_json(
                    {"dbfs": buf.tail_level(), "overruns": buf.overruns}
                )
                await asyncio.sleep(METER_WINDOW_S)
        except WebSocketDisconnect:
            pass

    # ------------------------------------------------------------ analysis

    @app.post(API + "/sessions/{session_id}/analyze")
    def analyze(session_id: str, body: dict = Body(default={})):
        return _store().analyze(
            session_id, recording_anchor=int(body.get("recording_anchor", 1))
        )

    @app.get(API + "/sessions/{session_id}/results")
    def results(session_id: str):
        return _store().results(session_id)

    # --------------------------------------------------------- calibration

    @app.get(API + "/calibration/noise.wav")
    def noise_wav(duration: float = Query(default=2.0, gt=0.0, le=30.0)):
        rate = MeasurementConfig().rate
        blob = wavio.wav_bytes(pink_noise(duration, rate), rate)
        return Response(blob, media_type="audio/wav")

    @app.post(API + "/calibration/offset")
    def set_offset(body: dict = Body(...)):
        _store().set_calibration_offset(float(body["offset_samples"]))
        return {"offset_samples": _store().calibration_offset()}

    @app.get(API + "/calibration/offset")
    def get_offset():
        return {"offset_samples": _store().calibration_offset()}

    @app.post(API + "/sessions/{session_id}/calibration/measure")
    def measure_offset(session_id: str):
        return {"offset_samples": _store().measure_calibration_offset(session_id)}

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        # mounted last so /api/v1 routes keep precedence
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
