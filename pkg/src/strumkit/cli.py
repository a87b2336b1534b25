"""Command-line entry points for the pipeline stages.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from strumkit import dsp
from strumkit.annotation import (AnnotationSession, RecordingPlan,
                                 auto_annotate, export_annotations)
from strumkit.audio import load_wav, resample
from strumkit.config import AppConfig, load_app_config
from strumkit.evaluation import class_scores, evaluate_run, render_report_table
from strumkit.events import StrumEvent, read_labels, write_labels
from strumkit.motion import load_motion_csv
from strumkit.neural import (NetworkConfig, Recording, TargetSpec, TrainConfig,
                             load_checkpoint, save_checkpoint, train,
                             transcribe)
from strumkit.synthesis.dataset import (DatasetConfig, DatasetManifest,
                                        generate_dataset)

NETWORK_SIZES = {
    "tiny": NetworkConfig(conv_channels=(4, 8), fc_width=32,
                          gru_units=16, merge_gru_units=16),
    "small": NetworkConfig(conv_channels=(8, 16, 24, 32), fc_width=96,
                           gru_units=48, merge_gru_units=48),
    "full": NetworkConfig(),
}

PITCH_SHIFT_ABLATION = (0, 3, 6, 12)


class _Parser(argparse.ArgumentParser):
    """argparse parser that exits 1 (not 2) on usage errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="strumkit")
    parser.add_argument("--config", type=str, default=None,
                        help="JSON application config file")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    synth = sub.add_parser("synth", help="synthetic data tools")
    synth_sub = synth.add_subparsers(dest="synth_command", required=True,
                                     parser_class=_Parser)
    gen = synth_sub.add_parser("generate", help="generate a labeled dataset")
    gen.add_argument("--count", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=str, required=True)

    tr = sub.add_parser("train", help="train a transcription model")
    tr.add_argument("--data", type=str, required=True,
                    help="dataset directory with a manifest")
    tr.add_argument("--out", type=str, required=True, help="checkpoint path")
    tr.add_argument("--steps", type=int, default=None)
    tr.add_argument("--seed", type=int, default=None)
    tr.add_argument("--batch", type=int, default=None)
    tr.add_argument("--max-shift", type=int, default=None,
                    choices=PITCH_SHIFT_ABLATION)
    tr.add_argument("--size", choices=sorted(NETWORK_SIZES), default="small")

    ts = sub.add_parser("transcribe", help="transcribe a recording")
    ts.add_argument("--model", type=str, required=True)
    ts.add_argument("--in", dest="input", type=str, required=True)
    ts.add_argument("--out", type=str, required=True)
    ts.add_argument("--threshold", type=float, default=0.3)
    ts.add_argument("--min-gap", type=float, default=0.05)

    ev = sub.add_parser("eval", help="score an estimate against a reference")
    ev.add_argument("--ref", type=str, required=True)
    ev.add_argument("--est", type=str, required=True)
    ev.add_argument("--tol", type=float, default=0.05)
    ev.add_argument("--out", type=str, default=None,
                    help="write the JSON report here as well")

    ab = sub.add_parser("ablate", help="ablation studies")
    ab_sub = ab.add_subparsers(dest="ablate_command", required=True,
                               parser_class=_Parser)
    ps = ab_sub.add_parser("pitch-shift",
                           help="train/evaluate at each max pitch shift")
    ps.add_argument("--data", type=str, required=True)
    ps.add_argument("--out", type=str, required=True,
                    help="report path (table; JSON written alongside)")
    ps.add_argument("--steps", type=int, default=200)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--batch", type=int, default=2)
    ps.add_argument("--size", choices=sorted(NETWORK_SIZES), default="tiny")

    an = sub.add_parser("annotate", help="semi-automatic annotation")
    an_sub = an.add_subparsers(dest="annotate_command", required=True,
                               parser_class=_Parser)
    auto = an_sub.add_parser("auto", help="run the automatic pipeline once")
    auto.add_argument("--audio", type=str, required=True)
    auto.add_argument("--plan", type=str, required=True,
                      help="JSON recording plan")
    auto.add_argument("--out", type=str, required=True, help="label CSV path")
    auto.add_argument("--motion", type=str, default=None)
    auto.add_argument("--start", type=float, default=0.0)
    auto.add_argument("--offset", type=float, default=0.0)
    srv = an_sub.add_parser("serve", help="run the annotation HTTP service")
    srv.add_argument("--port", type=int, default=None)

    return parser


def _load_split(data_dir: Path, split: str) -> list[Recording]:
    manifest = DatasetManifest.from_json((data_dir / "manifest").read_text())
    out = []
    for entry in manifest.entries:
        if entry.split != split:
            continue
        clip = resample(load_wav(data_dir / entry.audio_path), dsp.SAMPLE_RATE)
        events = read_labels(data_dir / entry.label_path)
        out.append(Recording(clip, tuple(events)))
    if not out:
        raise ValueError(f"no {split} examples under {data_dir}")
    return out


def _train_config(base: TrainConfig, args) -> TrainConfig:
    overrides = {}
    if args.steps is not None:
        overrides["steps"] = args.steps
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.batch is not None:
        overrides["batch_size"] = args.batch
    if getattr(args, "max_shift", None) is not None:
        overrides["max_pitch_shift"] = args.max_shift
    from dataclasses import replace
    return replace(base, **overrides)


def _nearest_chord_lookup(events: list[StrumEvent]):
    times = np.array([e.time_s for e in events])

    def chord_at(t: float):
        if len(times) == 0:
            return None
        return events[int(np.argmin(np.abs(times - t)))].chord

    return chord_at


def _cmd_synth_generate(args, config: AppConfig) -> int:
    cfg = DatasetConfig(count=args.count, seed=args.seed)
    manifest = generate_dataset(cfg, args.out)
    counts = manifest.split_counts()
    print(f"wrote {cfg.count} examples to {args.out} "
          f"(train {counts['train']}, valid {counts['valid']}, "
          f"test {counts['test']})")
    return 0


def _cmd_train(args, config: AppConfig) -> int:
    data_dir = Path(args.data)
    recordings = _load_split(data_dir, "train")
    train_cfg = _train_config(config.train, args)
    net_cfg = NETWORK_SIZES[args.size]
    log_path = Path(args.out).with_suffix(Path(args.out).suffix + ".log")
    with open(log_path, "w") as log_file:
        def log(line: str) -> None:
            print(line)
            log_file.write(line + "\n")
        model, _ = train(recordings, net_cfg, config.target_spec,
                         train_cfg, log=log)
    save_checkpoint(args.out, model, config.target_spec)
    print(f"checkpoint written to {args.out}")
    return 0


def _cmd_transcribe(args, config: AppConfig) -> int:
    model, spec = load_checkpoint(args.model)
    clip = load_wav(args.input)
    events = transcribe(model, clip, spec, threshold=args.threshold,
                        min_gap_s=args.min_gap)
    write_labels(args.out, events)
    print(f"{len(events)} events written to {args.out}")
    return 0


def _cmd_eval(args, config: AppConfig) -> int:
    ref = read_labels(args.ref)
    est = read_labels(args.est)
    chord_at = _nearest_chord_lookup(est) if est else None
    report, payload = evaluate_run(ref, est, args.tol,
                                   dataset_id=Path(args.ref).stem,
                                   chord_at=chord_at)
    print(render_report_table({"eval": report}), end="")
    if args.out:
        Path(args.out).write_text(payload)
    else:
        print(payload, end="")
    return 0


def _cmd_ablate_pitch_shift(args, config: AppConfig) -> int:
    data_dir = Path(args.data)
    recordings = _load_split(data_dir, "train")
    held_out = _load_split(data_dir, "test")
    net_cfg = NETWORK_SIZES[args.size]

    rows = {}
    json_rows = []
    for shift in PITCH_SHIFT_ABLATION:
        train_cfg = TrainConfig(steps=args.steps, seed=args.seed,
                                batch_size=args.batch, max_pitch_shift=shift)
        model, _ = train(recordings, net_cfg, config.target_spec, train_cfg)
        # recordings are scored jointly; shift each onto its own time span
        # so events from different recordings can never cross-match
        ref, est = [], []
        base = 0.0
        for rec in held_out:
            decoded = transcribe(model, rec.audio, config.target_spec)
            ref += [e.shifted(base) for e in rec.events]
            est += [e.shifted(base) for e in decoded]
            base += rec.audio.duration_s + 10.0
        report = class_scores(ref, est, config.tolerance_s,
                              dataset_id=f"max_shift_{shift}")
        rows[f"max_shift={shift}"] = report
        entry = report.to_dict()
        entry["max_pitch_shift"] = shift
        json_rows.append(entry)
        print(f"max shift {shift}: F1_any {report.any.f1:.4f}")

    table = render_report_table(rows)
    Path(args.out).write_text(table)
    json_path = Path(args.out).with_suffix(".json")
    json_path.write_text(json.dumps(json_rows, indent=2, sort_keys=True) + "\n")
    print(table, end="")
    print(f"report written to {args.out} and {json_path}")
    return 0


def _cmd_annotate_auto(args, config: AppConfig) -> int:
    clip = load_wav(args.audio)
    plan = RecordingPlan.from_dict(json.loads(Path(args.plan).read_text()))
    trace = load_motion_csv(args.motion) if args.motion else None
    session = AnnotationSession(audio=clip, plan=plan, motion=trace,
                                start_time_s=args.start,
                                motion_offset_s=args.offset)
    session.events = auto_annotate(session)
    Path(args.out).write_text(export_annotations(session.events))
    print(f"{len(session.events)} events written to {args.out}")
    return 0


def _cmd_annotate_serve(args, config: AppConfig) -> int:
    from dataclasses import replace

    from strumkit.service import serve
    if args.port is not None:
        config = replace(config, service_port=args.port)
    serve(config)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        config = load_app_config(args.config)
        if args.command == "synth":
            return _cmd_synth_generate(args, config)
        if args.command == "train":
            return _cmd_train(args, config)
        if args.command == "transcribe":
            return _cmd_transcribe(args, config)
        if args.command == "eval":
            return _cmd_eval(args, config)
        if args.command == "ablate":
            return _cmd_ablate_pitch_shift(args, config)
        if args.command == "annotate":
            if args.annotate_command == "auto":
                return _cmd_annotate_auto(args, config)
            return _cmd_annotate_serve(args, config)
        print(f"unknown command: {args.command}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 2
    except Exception as exc:
        print(f"strumkit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
