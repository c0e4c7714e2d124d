from __future__ import annotations

import argparse
import json

import numpy as np
import pytest

from pitchprobe.session.cli import main, parse_harmonics, parse_seeds
from pitchprobe.session.wavio import read_wav, write_wav

SMALL_ARGS = ["--duration", "6", "--harmonics", "1-8"]


def test_parse_harmonics():
    assert parse_harmonics("1-4") == (1, 2, 3, 4)
    assert parse_harmonics("2,5,9") == (2, 5, 9)
    assert parse_harmonics("1-3,7") == (1, 2, 3, 7)
    with pytest.raises(argparse.ArgumentTypeError):
        parse_harmonics("0-3")
    with pytest.raises(argparse.ArgumentTypeError):
        parse_harmonics("abc")


def test_parse_seeds():
    assert parse_seeds("1,2,3") == (1, 2, 3)
    with pytest.raises(argparse.ArgumentTypeError):
        parse_seeds("1,2")
    with pytest.raises(argparse.ArgumentTypeError):
        parse_seeds("1,2,x")


def test_generate_and_analyze(tmp_path):
    out = tmp_path / "gen"
    assert main(["generate", "--out", str(out), *SMALL_ARGS]) == 0
    wav = out / "stimulus.wav"
    sidecar = out / "stimulus.json"
    assert wav.is_file() and sidecar.is_file()
    cfg = json.loads(sidecar.read_text())
    assert cfg["total_duration"] == 6.0

    samples, rate = read_wav(wav)
    rec_path = tmp_path / "rec.wav"
    write_wav(rec_path, samples, rate)

    analysis = tmp_path / "analysis.json"
    code = main(
        [
            "analyze",
            "--stimulus", str(wav),
            "--recording", str(rec_path),
            "--out", str(analysis),
        ]
    )
    assert code == 0
    result = json.loads(analysis.read_text())
    assert result["schema"] == "pitchprobe.analysis/1"
    assert result["significant"] is False


def test_analyze_missing_sidecar(tmp_path, capsys):
    wav = tmp_path / "solo.wav"
    write_wav(wav, np.zeros(1000), 44100)
    code = main(
        [
            "analyze",
            "--stimulus", str(wav),
            "--recording", str(wav),
            "--out", str(tmp_path / "a.json"),
        ]
    )
    assert code == 2
    assert "sidecar" in capsys.readouterr().err


def test_simulate(tmp_path):
    out = tmp_path / "sim"
    code = main(
        ["simulate", "--out", str(out), "--sessions", "2", *SMALL_ARGS]
    )
    assert code == 0
    for k in range(2):
        d = out / f"session-{k:02d}"
        assert (d / "stimulus.wav").is_file()
        assert (d / "recording.wav").is_file()
        assert (d / "analysis.json").is_file()
    avg = json.loads((out / "average.json").read_text())
    assert avg["schema"] == "pitchprobe.average/1"
    assert avg["n_sessions"] == 2


def test_calibrate(tmp_path):
    wav = tmp_path / "pink.wav"
    assert main(["calibrate", "--out", str(wav), "--duration", "1"]) == 0
    samples, rate = read_wav(wav)
    assert len(samples) == rate
