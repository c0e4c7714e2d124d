"""Command-line entry points: generate, analyze, simulate, serve, calibrate."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from ..config import SESSION_SEED_SETS, MeasurementConfig
from ..stimsynth import CarrierSpec
from ..subjsim import SubjectModel, simulate_subject
from ..sysresp import average_sessions
from . import pipeline, wavio
from .calibration import pink_noise
from .store import DATA_ROOT_ENV, SessionStore

UI_DIR_ENV = "PITCHPROBE_UI"


def parse_harmonics(text: str) -> tuple[int, ...]:
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                lo, hi = part.split("-", 1)
                out.extend(range(int(lo), int(hi) + 1))
            elif part:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad harmonic list {text!r}")
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError("harmonics must be positive integers")
    return tuple(out)


def parse_seeds(text: str) -> tuple[int, int, int]:
    try:
        seeds = tuple(int(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}")
    if len(seeds) != 3:
        raise argparse.ArgumentTypeError("need exactly three seeds")
    return seeds


def _add_config_args(p: argparse.ArgumentParser) -> None:
    d = MeasurementConfig()
    p.add_argument("--rate", type=int, default=d.rate)
    p.add_argument("--t-r", type=int, default=d.t_r, dest="t_r")
    p.add_argument("--duration", type=float, default=d.total_duration)
    p.add_argument("--f-target", type=float, default=d.f_target)
    p.add_argument("--sd", type=float, default=d.modulation_sd,
                   help="modulation SD in cents")
    p.add_argument("--smoothing", type=int, default=d.smoothing_length)
    p.add_argument("--seeds", type=parse_seeds, default=d.seeds)
    p.add_argument("--harmonics", type=parse_harmonics, default=d.harmonics)
    p.add_argument("--phase-mode", default=d.phase_mode)
    p.add_argument("--phase-seed", type=int, default=None)


def _config_from(args: argparse.Namespace) -> MeasurementConfig:
    return MeasurementConfig(
        rate=args.rate,
        t_r=args.t_r,
        total_duration=args.duration,
        f_target=args.f_target,
        modulation_sd=args.sd,
        smoothing_length=args.smoothing,
        seeds=tuple(args.seeds),
        harmonics=tuple(args.harmonics),
        phase_mode=args.phase_mode,
        phase_seed=args.phase_seed,
    )


def cmd_generate(args: argparse.Namespace) -> int:
    config = _config_from(args)
    stimulus = pipeline.generate_stimulus(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    wavio.write_wav(out / "stimulus.wav", stimulus.audio, config.rate)
    (out / "stimulus.json").write_text(json.dumps(config.to_dict(), indent=2))
    print(f"wrote {out / 'stimulus.wav'} ({config.total_duration:g} s)")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    sidecar = Path(args.sidecar) if args.sidecar else Path(args.stimulus).with_suffix(".json")
    if not sidecar.is_file():
        print(f"missing parameter sidecar {sidecar}", file=sys.stderr)
        return 2
    config = MeasurementConfig.from_dict(json.loads(sidecar.read_text()))
    stimulus = pipeline.generate_stimulus(config)
    recording, rate = wavio.read_wav(args.recording)
    if rate != config.rate:
        print("recording rate does not match the stimulus", file=sys.stderr)
        return 2
    est = pipeline.analyze_pair(
        stimulus,
        recording,
        offset_samples=args.offset_samples,
        recording_anchor=args.anchor,
    )
    result = pipeline.estimate_to_dict(est)
    Path(args.out).write_text(json.dumps(result, indent=2))
    lat = "n/a" if est.latency_ms is None else f"{est.latency_ms:.1f} ms"
    print(
        f"peak {est.peak_cents:.2f} cents, residual {est.residual_level:.3f}, "
        f"latency {lat} (significant={est.significant})"
    )
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    voice = CarrierSpec(
        f_target=args.f_target, harmonics=tuple(args.voice_harmonics)
    )
    model = SubjectModel(
        gain=args.gain,
        latency=args.latency,
        kernel_natural_hz=args.natural_hz,
        kernel_damping=args.damping,
        drift_sd=args.drift_sd,
        jitter_sd=args.jitter_sd,
        voice=voice,
    )
    estimates = []
    for i in range(args.sessions):
        seeds = SESSION_SEED_SETS[i % len(SESSION_SEED_SETS)]
        config = _config_from(args)
        config = MeasurementConfig(**{**config.to_dict(), "seeds": seeds})
        stimulus = pipeline.generate_stimulus(config)
        recording = simulate_subject(stimulus, model, seed=args.subject_seed + i)
        d = out / f"session-{i:02d}"
        d.mkdir(exist_ok=True)
        wavio.write_wav(d / "stimulus.wav", stimulus.audio, config.rate)
        wavio.write_wav(d / "recording.wav", recording, config.rate)
        est = pipeline.analyze_pair(
            stimulus,
            recording,
            recording_anchor=min(voice.harmonics),
            session_id=d.name,
        )
        (d / "analysis.json").write_text(
            json.dumps(pipeline.estimate_to_dict(est), indent=2)
        )
        estimates.append(est)
        lat = "n/a" if est.latency_ms is None else f"{est.latency_ms:.1f} ms"
        print(f"{d.name}: latency {lat}, residual {est.residual_level:.3f}")
    if len(estimates) > 1:
        avg = average_sessions(estimates)
        (out / "average.json").write_text(
            json.dumps(pipeline.averaged_to_dict(avg), indent=2)
        )
        lat = "n/a" if avg.latency_ms is None else f"{avg.latency_ms:.1f} ms"
        print(f"average of {avg.n_sessions}: latency {lat}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    store = SessionStore(args.data_root) if args.data_root else SessionStore()
    ui_dir = args.ui_dir or os.environ.get(UI_DIR_ENV)
    app = create_app(store, ui_dir=ui_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_calibrate(args: argparse.Namespace) -> int:
    rate = args.rate
    noise = pink_noise(args.duration, rate)
    wavio.write_wav(args.out, noise, rate)
    print(f"wrote {args.out}: pink reference at -20 dBFS")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="pitchprobe",
        description="Pitch-perturbation measurement toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="render a stimulus and its sidecar")
    _add_config_args(p)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", help="analyze a recorded session")
    p.add_argument("--stimulus", required=True, help="stimulus WAV (sidecar JSON beside it)")
    p.add_argument("--sidecar", default=None)
    p.add_argument("--recording", required=True)
    p.add_argument("--out", default="analysis.json")
    p.add_argument("--anchor", type=int, default=1)
    p.add_argument("--offset-samples", type=float, default=0.0)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="run simulated closed-loop sessions")
    _add_config_args(p)
    p.add_argument("--out", default="simulated")
    p.add_argument("--sessions", type=int, default=1)
    p.add_argument("--gain", type=float, default=-0.1)
    p.add_argument("--latency", type=float, default=0.1)
    p.add_argument("--natural-hz", type=float, default=40.0)
    p.add_argument("--damping", type=float, default=1.0)
    p.add_argument("--drift-sd", type=float, default=1.0)
    p.add_argument("--jitter-sd", type=float, default=0.5)
    p.add_argument("--subject-seed", type=int, default=1)
    p.add_argument("--voice-harmonics", type=parse_harmonics, default=tuple(range(1, 21)))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="run the HTTP measurement service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--data-root", default=None,
                   help=f"session storage root (default ${DATA_ROOT_ENV} or ~/.pitchprobe)")
    p.add_argument("--ui-dir", default=None,
                   help=f"serve the browser console from this directory (default ${UI_DIR_ENV})")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("calibrate", help="write the pink calibration reference")
    p.add_argument("--out", default="pink.wav")
    p.add_argument("--duration", type=float, default=2.0)
    p.add_argument("--rate", type=int, default=MeasurementConfig().rate)
    p.set_defaults(func=cmd_calibrate)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
