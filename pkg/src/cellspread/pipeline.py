"""End-to-end runs: batch sequences, hand-tuned single frames, evaluation.

Batch mode pushes every frame through the same filter chain and
threshold.  Single mode adds the frequency-domain band-pass between
boundary emphasis and thresholding, with cutoffs and threshold either
from the config or from a per-frame override -- the escape hatch for
frames the shared settings cannot crack.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .filters import (
    fft_bandpass,
    flat_field_correct,
    g_neighbor_smooth,
    kuwahara,
    local_stddev,
)
from .image_io import FrameSequence, load_frame, load_mask, normalize
from .measure import (
    CellMeasurement,
    EvalResult,
    evaluate,
    measure_frame,
    population_curve,
)
from .report import SequenceReport, emit_report
from .segmentation import SegmentationResult, segment


class NoMatchedPairsError(RuntimeError):
    """Evaluation found no prediction/truth filename pairs at all."""


def preprocess_frame(img: np.ndarray, config: PipelineConfig) -> np.ndarray:
    """Shared front of both chains: normalize, flatten illumination,
    denoise, smooth, and turn boundaries into bright ridges."""
    out = normalize(np.asarray(img, dtype=np.float64))
    out = flat_field_correct(out, config.flat_field)
    out = g_neighbor_smooth(out, config.g_neighbor)
    out = kuwahara(out, config.kuwahara_window)
    return local_stddev(out, config.stddev_window)


def run_batch(
    config: PipelineConfig,
    sequence: FrameSequence,
    out_dir: str | Path | None = None,
) -> SequenceReport:
    """Segment and measure every frame of a sequence with the shared
    settings (no band-pass), in order, deterministically.

    When `out_dir` is given the full report (delimited tables, masks,
    resolved config, figures) is written there as well.
    """
    if config.mode != "batch":
        raise ValueError(f"run_batch needs mode='batch', got {config.mode!r}")
    if len(sequence) == 0:
        raise ValueError("run_batch needs a non-empty sequence")
    measurements: list[CellMeasurement] = []
    masks: list[np.ndarray] = []
    names: list[str] = []
    for ref in sequence:
        try:
            img = load_frame(ref.path)
        except OSError as exc:
            raise OSError(f"frame {ref.path.name}: {exc}") from exc
        ridge = preprocess_frame(img, config)
        result = segment(
            ridge, config.threshold, config.morphology, config.speck_min_area
        )
        measurements.append(measure_frame(result, ref.index, ref.timestamp))
        masks.append(result.mask)
        names.append(ref.path.name)
    population = population_curve([measurements]) if measurements else None
    report = SequenceReport(
        measurements=tuple(measurements),
        masks=tuple(masks),
        frame_names=tuple(names),
        population=population,
        config=config,
    )
    if out_dir is not None:
        emit_report(report, out_dir)
    return report


def run_single(
    config: PipelineConfig,
    frame: np.ndarray,
    frame_index: int,
) -> tuple[SegmentationResult, CellMeasurement]:
    """Segment one frame with the band-pass chain.

    Cutoffs and threshold come from the frame's override when present,
    else from the config; a missing band-pass either way is an error
    because this chain exists precisely to apply one.
    """
    if config.mode != "single":
        raise ValueError(f"run_single needs mode='single', got {config.mode!r}")
    override = config.override_for(frame_index)
    if override is not None:
        bandpass = override.bandpass
        threshold = override.threshold
    else:
        if config.bandpass is None:
            raise ValueError(
                f"frame {frame_index}: no band-pass cutoffs given "
                "(set config.bandpass or a frame override)"
            )
        bandpass = config.bandpass
        threshold = config.threshold
    ridge = preprocess_frame(frame, config)
    filtered = fft_bandpass(ridge, bandpass)
    result = segment(
        filtered, threshold, config.morphology, config.speck_min_area
    )
    measurement = measure_frame(
        result, frame_index, frame_index * config.interval
    )
    return result, measurement


@dataclass(frozen=True)
class EvalReport:
    pairs: tuple[tuple[str, EvalResult], ...]
    skipped: tuple[str, ...]

    @property
    def mean_dice(self) -> float:
        return float(np.mean([r.dice for _, r in self.pairs]))

    @property
    def min_dice(self) -> float:
        return float(min(r.dice for _, r in self.pairs))

    def to_dict(self) -> dict:
        return {
            "pairs": {
                name: {
                    "dice": r.dice,
                    "iou": r.iou,
                    "perimeter_rel_error": r.perimeter_rel_error,
                }
                for name, r in self.pairs
            },
            "skipped": list(self.skipped),
            "summary": {
                "count": len(self.pairs),
                "mean_dice": self.mean_dice,
                "min_dice": self.min_dice,
            },
        }


def run_eval(
    pred_dir: str | Path,
    truth_dir: str | Path,
    pattern: str = "*.png",
) -> EvalReport:
    """Compare predicted masks to ground truth, matched by filename.

    Predictions with no same-named truth file are listed as skipped
    rather than counted against the score; finding no pairs at all is
    an error.
    """
    pred_dir = Path(pred_dir)
    truth_dir = Path(truth_dir)
    pairs: list[tuple[str, EvalResult]] = []
    skipped: list[str] = []
    for pred_path in sorted(pred_dir.glob(pattern)):
        truth_path = truth_dir / pred_path.name
        if not truth_path.exists():
            skipped.append(pred_path.name)
            continue
        pairs.append(
            (pred_path.name, evaluate(load_mask(pred_path), load_mask(truth_path)))
        )
    if not pairs:
        raise NoMatchedPairsError(
            f"no prediction in {pred_dir} has a matching truth mask in {truth_dir}"
        )
    return EvalReport(pairs=tuple(pairs), skipped=tuple(skipped))
