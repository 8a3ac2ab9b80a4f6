"""Segmentation toolkit for DIC time-lapse imaging of spreading cells.

The package covers the whole workflow: frame I/O, the preprocessing
filter chain, threshold/morphology segmentation, contour morphometrics,
batch and per-frame pipelines, delimited reports with rendered figures,
and an interactive tuning service for hard frames.
"""

from .image_io import (
    EmptySequenceError,
    FrameRef,
    FrameSequence,
    ImageFormatError,
    crop,
    load_frame,
    load_mask,
    load_sequence,
    normalize,
    save_mask,
)
from .filters import (
    BandPassParams,
    FlatFieldParams,
    GNeighborParams,
    bandpass_transfer,
    fft_bandpass,
    flat_field_correct,
    g_neighbor_smooth,
    g_neighbor_threshold,
    kuwahara,
    local_stddev,
)
from .segmentation import (
    MorphologyPlan,
    SegmentationResult,
    binarize,
    close,
    disk_element,
    erode,
    fill_holes,
    largest_object,
    otsu_threshold,
    remove_specks,
    segment,
)
from .measure import (
    CellMeasurement,
    EvalResult,
    PopulationCurve,
    circularity,
    evaluate,
    mask_perimeter,
    measure_frame,
    perimeter,
    population_curve,
    trace_contour,
)
from .config import FrameOverride, PipelineConfig
from .pipeline import (
    EvalReport,
    NoMatchedPairsError,
    preprocess_frame,
    run_batch,
    run_eval,
    run_single,
)
from .report import SequenceReport, emit_report, read_measurements_csv

__version__ = "0.1.0"

__all__ = [
    "EmptySequenceError",
    "FrameRef",
    "FrameSequence",
    "ImageFormatError",
    "crop",
    "load_frame",
    "load_mask",
    "load_sequence",
    "normalize",
    "save_mask",
    "BandPassParams",
    "FlatFieldParams",
    "GNeighborParams",
    "bandpass_transfer",
    "fft_bandpass",
    "flat_field_correct",
    "g_neighbor_smooth",
    "g_neighbor_threshold",
    "kuwahara",
    "local_stddev",
    "MorphologyPlan",
    "SegmentationResult",
    "binarize",
    "close",
    "disk_element",
    "erode",
    "fill_holes",
    "largest_object",
    "otsu_threshold",
    "remove_specks",
    "segment",
    "CellMeasurement",
    "EvalResult",
    "PopulationCurve",
    "circularity",
    "evaluate",
    "mask_perimeter",
    "measure_frame",
    "perimeter",
    "population_curve",
    "trace_contour",
    "FrameOverride",
    "PipelineConfig",
    "EvalReport",
    "NoMatchedPairsError",
    "preprocess_frame",
    "run_batch",
    "run_eval",
    "run_single",
    "SequenceReport",
    "emit_report",
    "read_measurements_csv",
]
