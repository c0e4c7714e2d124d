"""Mono 24-bit PCM WAV reading and writing.

The stdlib wave module cannot round-trip 24-bit float data without manual
byte packing anyway, so the RIFF framing is done directly here.
"""

from __future__ import annotations

import io
import struct
from pathlib import Path

import numpy as np

from ..errors import ParameterError

_SCALE = float(1 << 23)


def _encode_pcm24(samples: np.ndarray) -> bytes:
    x = np.asarray(samples, float)
    ints = np.clip(np.round(x * _SCALE), -_SCALE, _SCALE - 1).astype("<i4")
    # little-endian: the low three bytes of each int32 are the 24-bit value
    return np.frombuffer(ints.tobytes(), np.uint8).reshape(-1, 4)[:, :3].tobytes()


def _decode_pcm24(payload: bytes) -> np.ndarray:
    raw = np.frombuffer(payload, np.uint8)
    if len(raw) % 3:
        raise ParameterError("24-bit payload length is not a multiple of 3")
    tri = raw.reshape(-1, 3)
    quad = np.zeros((len(tri), 4), np.uint8)
    quad[:, :3] = tri
    quad[:, 3] = np.where(tri[:, 2] & 0x80, 0xFF, 0)
    return quad.view("<i4")[:, 0].astype(float) / _SCALE


def wav_bytes(samples: np.ndarray, rate: int) -> bytes:
    data = _encode_pcm24(samples)
    pad = len(data) & 1  # RIFF chunks are word-aligned
    out = io.BytesIO()
    out.write(b"RIFF")
    out.write(struct.pack("<I", 36 + len(data) + pad))
    out.write(b"WAVE")
    out.write(b"fmt ")
    out.write(struct.pack("<IHHIIHH", 16, 1, 1, rate, rate * 3, 3, 24))
    out.write(b"data")
    out.write(struct.pack("<I", len(data)))
    out.write(data)
    out.write(b"\x00" * pad)
    return out.getvalue()


def write_wav(path: str | Path, samples: np.ndarray, rate: int) -> None:
    Path(path).write_bytes(wav_bytes(samples, rate))


def parse_wav(blob: bytes) -> tuple[np.ndarray, int]:
    if blob[:4] != b"RIFF" or blob[8:12] != b"WAVE":
        raise ParameterError("not a RIFF/WAVE file")
    pos = 12
    rate = None
    bits = None
    channels = None
    data = None
    while pos + 8 <= len(blob):
        tag = blob[pos : pos + 4]
        (size,) = struct.unpack("<I", blob[pos + 4 : pos + 8])
        body = blob[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise ParameterError("truncated chunk")
        if tag == b"fmt ":
            fmt, channels, rate, _, _, bits = struct.unpack("<HHIIHH", body[:16])
            if fmt != 1:
                raise ParameterError("only PCM WAV is supported")
        elif tag == b"data":
            data = body
        pos += 8 + size + (size & 1)
    if rate is None or data is None:
        raise ParameterError("missing fmt or data chunk")
    if channels != 1 or bits != 24:
        raise ParameterError("expected mono 24-bit PCM")
    return _decode_pcm24(data), int(rate)


def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
    return parse_wav(Path(path).read_bytes())
