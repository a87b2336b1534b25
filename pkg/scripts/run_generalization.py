"""Desk-scale generalization experiment.

Trains a transcriber on 200 synthetic examples and evaluates event F1 and
chord accuracy on 20 held-out synthetic examples. Writes a checkpoint and a
JSON result record. Fully deterministic given --seed.

Usage:
    python3 scripts/run_generalization.py --out results/generalization \
        --steps 4000 --batch 4 --size small
"""

from __future__ import annotations

import argparse
import json
import time
from pathlib import Path

import numpy as np

from strumkit import dsp
from strumkit.audio import resample
from strumkit.cli import NETWORK_SIZES
from strumkit.evaluation import class_scores, match_times
from strumkit.neural import (Recording, TargetSpec, TrainConfig,
                             save_checkpoint, train, transcribe)
from strumkit.synthesis.dataset import DatasetConfig, generate_example

N_TRAIN = 200
N_EVAL = 20
DATA_SEED = 606


def make_recordings(indices: range, seed: int = DATA_SEED) -> list[Recording]:
    cfg = DatasetConfig(count=N_TRAIN + N_EVAL, seed=seed)
    out = []
    for i in indices:
        clip, events, _ = generate_example(cfg, i)
        out.append(Recording(resample(clip, dsp.SAMPLE_RATE), tuple(events)))
    return out


def evaluate_model(model, spec: TargetSpec, threshold: float = 0.3) -> dict:
    """Score a model on the fixed held-out recordings.

    Recordings are shifted onto disjoint time spans before pooled matching so
    events can never match across recordings. Chord accuracy is measured at
    matched ground-truth times; misses count as wrong.
    """
    held_out = make_recordings(range(N_TRAIN, N_TRAIN + N_EVAL))
    ref_all, est_all = [], []
    chord_hits, chord_total = 0, 0
    base = 0.0
    for rec in held_out:
        decoded = transcribe(model, rec.audio, spec, threshold=threshold)
        pairs = match_times([e.time_s for e in rec.events],
                            [e.time_s for e in decoded], 0.05)
        for ri, ci in pairs:
            chord_total += 1
            chord_hits += rec.events[ri].chord == decoded[ci].chord
        chord_total += len(rec.events) - len(pairs)
        ref_all += [e.shifted(base) for e in rec.events]
        est_all += [e.shifted(base) for e in decoded]
        base += rec.audio.duration_s + 10.0

    report = class_scores(ref_all, est_all, 0.05)
    return {
        "f1_any": report.any.f1,
        "p_any": report.any.precision,
        "r_any": report.any.recall,
        "f1_down": report.down.f1,
        "f1_up": report.up.f1,
        "chord_accuracy": chord_hits / chord_total if chord_total else 0.0,
        "n_train": N_TRAIN,
        "n_eval": N_EVAL,
    }


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", type=str, default="results/generalization")
    parser.add_argument("--steps", type=int, default=4000)
    parser.add_argument("--batch", type=int, default=4)
    parser.add_argument("--size", choices=sorted(NETWORK_SIZES), default="small")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--lr", type=float, default=1e-3)
    parser.add_argument("--max-shift", type=int, default=0,
                        choices=(0, 3, 6, 12))
    parser.add_argument("--threshold", type=float, default=0.3)
    parser.add_argument("--eval-only", type=str, default=None,
                        help="skip training and evaluate this checkpoint")
    args = parser.parse_args()

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    spec = TargetSpec()

    t0 = time.time()
    if args.eval_only:
        from strumkit.neural import load_checkpoint
        model, spec = load_checkpoint(args.eval_only)
    else:
        print(f"building {N_TRAIN} training recordings", flush=True)
        train_recs = make_recordings(range(N_TRAIN))
        print(f"built in {time.time() - t0:.0f}s", flush=True)
        cfg = TrainConfig(learning_rate=args.lr, steps=args.steps,
                          batch_size=args.batch,
                          max_pitch_shift=args.max_shift, seed=args.seed)
        net = NETWORK_SIZES[args.size]
        model, _ = train(train_recs, net, spec, cfg,
                         log=lambda s: print(s, flush=True))
        save_checkpoint(str(out) + ".ckpt", model, spec)
        del train_recs
    result = evaluate_model(model, spec, threshold=args.threshold)
    result.update({
        "steps": args.steps,
        "lr": args.lr,
        "batch": args.batch,
        "size": args.size,
        "seed": args.seed,
        "runtime_s": time.time() - t0,
    })
    Path(str(out) + ".json").write_text(
        json.dumps(result, indent=2, sort_keys=True) + "\n")
    print(json.dumps(result, indent=2, sort_keys=True), flush=True)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
