"""Command-line front door: batch runs, single-frame tuning runs,
ground-truth evaluation, and the interactive tuning service.

Exit codes: 0 success, 1 usage or configuration problem, 2 I/O problem,
3 nothing to work on (empty sequence / no matched evaluation pairs).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .config import FrameOverride, PipelineConfig
from .image_io import (
    EmptySequenceError,
    ImageFormatError,
    frame_number,
    load_frame,
    load_sequence,
    save_mask,
)
from .pipeline import NoMatchedPairsError, run_batch, run_eval, run_single
from .report import write_measurements_csv
from .service import TuneSession, measurement_json, serve


def _load_config(path: str | None, mode: str) -> PipelineConfig:
    config = PipelineConfig() if path is None else PipelineConfig.load(path)
    if config.mode != mode:
        config = replace(config, mode=mode)
    return config


def cmd_batch(args) -> int:
    config = _load_config(args.config, "batch")
    sequence = load_sequence(args.input, pattern=args.pattern, interval=config.interval)
    report = run_batch(config, sequence, out_dir=args.out)
    detected = sum(1 for m in report.measurements if m.detected)
    print(
        f"batch: {len(report.measurements)} frames, {detected} with a detected "
        f"cell; report written to {args.out}"
    )
    return 0


def cmd_single(args) -> int:
    config = _load_config(args.config, "single")
    if args.index is not None:
        index = args.index
    else:
        embedded = frame_number(args.frame)
        index = embedded if embedded is not None else 0
    existing = config.override_for(index)
    if existing is not None:
        src_d1, src_d2, src_thr = existing.d1, existing.d2, existing.threshold
    elif config.bandpass is not None:
        src_d1, src_d2 = config.bandpass.d1, config.bandpass.d2
        src_thr = config.threshold
    else:
        src_d1, src_d2, src_thr = None, 0.0, config.threshold
    d1 = args.d1 if args.d1 is not None else src_d1
    d2 = args.d2 if args.d2 is not None else src_d2
    threshold = args.threshold if args.threshold is not None else src_thr
    if d1 is None:
        raise ValueError(
            "no band-pass cutoffs for this frame: pass --d1/--d2 or put "
            "bandpass / frame_overrides into the config"
        )
    merged = config.with_override(
        index, FrameOverride(d1=d1, d2=d2, threshold=threshold)
    )
    frame = load_frame(args.frame)
    result, measurement = run_single(merged, frame, index)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    masks_dir = out_dir / "masks"
    masks_dir.mkdir(exist_ok=True)
    stem = Path(args.frame).stem
    save_mask(result.mask, masks_dir / f"{stem}_{index}.png")
    write_measurements_csv([measurement], out_dir / "measurements.csv")
    (out_dir / "measurement.json").write_text(
        json.dumps(measurement_json(measurement), indent=2) + "\n"
    )
    merged.save(out_dir / "config.resolved.json")
    state = "detected" if measurement.detected else "nothing detected"
    print(
        f"single: frame {index} (d1={d1}, d2={d2}, threshold={threshold}) -> "
        f"{state}, area {measurement.area} px; written to {args.out}"
    )
    return 0


def cmd_eval(args) -> int:
    report = run_eval(args.pred, args.truth, pattern=args.pattern)
    payload = report.to_dict()
    Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
    print(
        f"eval: {len(report.pairs)} pairs, {len(report.skipped)} skipped; "
        f"mean dice {report.mean_dice:.4f}, min dice {report.min_dice:.4f}; "
        f"details in {args.out}"
    )
    return 0


def cmd_serve(args) -> int:
    config = _load_config(args.config, "single")
    sequence = load_sequence(args.input, pattern=args.pattern, interval=config.interval)
    session = TuneSession(sequence, config)
    if args.ui is not None:
        ui_dir = Path(args.ui)
    else:
        candidate = Path("frontend") / "dist"
        ui_dir = candidate if (candidate / "index.html").is_file() else None
    print(f"serving {len(sequence)} frames on http://{args.host}:{args.port}/")
    serve(session, ui_dir=ui_dir, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cellspread",
        description="Segment DIC time-lapse frames of spreading cells and "
        "measure area, perimeter and circularity over time.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("batch", help="run a whole sequence with shared settings")
    b.add_argument("--config", required=True, help="pipeline config JSON")
    b.add_argument("--input", required=True, help="directory of frame PNGs")
    b.add_argument("--out", required=True, help="report directory")
    b.add_argument("--pattern", default="*.png")
    b.set_defaults(func=cmd_batch)

    s = sub.add_parser(
        "single", help="run one frame through the band-pass chain"
    )
    s.add_argument("--config", required=True, help="pipeline config JSON")
    s.add_argument("--frame", required=True, help="frame PNG")
    s.add_argument("--d1", type=float, help="band-pass outer cutoff")
    s.add_argument("--d2", type=float, help="band-pass inner cutoff")
    s.add_argument("--threshold", type=float, help="binarization threshold")
    s.add_argument(
        "--index",
        type=int,
        help="frame index (default: the number embedded in the filename)",
    )
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_single)

    e = sub.add_parser("eval", help="score predicted masks against ground truth")
    e.add_argument("--pred", required=True, help="directory of predicted masks")
    e.add_argument("--truth", required=True, help="directory of truth masks")
    e.add_argument("--out", required=True, help="JSON report file")
    e.add_argument("--pattern", default="*.png")
    e.set_defaults(func=cmd_eval)

    v = sub.add_parser("serve", help="start the interactive tuning service")
    v.add_argument("--input", required=True, help="directory of frame PNGs")
    v.add_argument("--config", help="pipeline config JSON (default settings if omitted)")
    v.add_argument("--port", type=int, default=8700)
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--ui", help="directory with the built tuning UI")
    v.add_argument("--pattern", default="*.png")
    v.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except (EmptySequenceError, NoMatchedPairsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ImageFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
