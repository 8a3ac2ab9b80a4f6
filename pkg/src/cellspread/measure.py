"""Contour tracing and morphometrics for segmented cells.

The boundary of a mask is walked pixel-by-pixel (Moore neighborhood,
clockwise in image coordinates); the perimeter is the length of that
walk counting straight steps as 1 and diagonal steps as sqrt(2), and
circularity compares area to perimeter so that a disk scores 1 and
spiky shapes score lower.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .segmentation import SegmentationResult, largest_object

# Moore neighborhood in clockwise order for y-down image coordinates,
# starting at the western neighbor: W, NW, N, NE, E, SE, S, SW.
_RING = (
    (0, -1), (-1, -1), (-1, 0), (-1, 1),
    (0, 1), (1, 1), (1, 0), (1, -1),
)
_RING_POS = {off: i for i, off in enumerate(_RING)}


def trace_contour(mask: np.ndarray) -> list[tuple[int, int]]:
    """Walk the outer boundary of a single-object mask clockwise.

    Starts at the topmost of the leftmost boundary pixels (first
    foreground pixel in row-major scan) and follows the Moore
    neighborhood, each step resuming the clockwise sweep from the
    previous backtrack position.  The walk stops on return to the
    starting pixel from the starting direction, which lets it traverse
    one-pixel-wide spurs twice (once per side) without stopping early.
    Returns (row, col) pairs; a lone pixel gives a single-entry contour.
    """
    mask = np.asarray(mask, dtype=bool)
    labels, count = ndimage.label(mask, structure=np.ones((3, 3), dtype=int))
    if count == 0:
        raise ValueError("cannot trace an empty mask")
    if count > 1:
        raise ValueError(
            f"contour tracing expects a single connected object, found {count}"
        )
    rows, cols = np.nonzero(mask)
    start = (int(rows[0]), int(cols[0]))  # row-major scan order
    height, width = mask.shape

    def is_fg(r: int, c: int) -> bool:
        return 0 <= r < height and 0 <= c < width and mask[r, c]

    # entering in a row-major scan means we arrived from the west
    backtrack = (start[0], start[1] - 1)
    seen = {(start, backtrack)}
    contour = [start]
    current = start
    while True:
        rel = (backtrack[0] - current[0], backtrack[1] - current[1])
        base = _RING_POS[rel]
        found = None
        for step in range(1, 9):
            off = _RING[(base + step) % 8]
            cand = (current[0] + off[0], current[1] + off[1])
            if is_fg(*cand):
                before = _RING[(base + step - 1) % 8]
                found = (cand, (current[0] + before[0], current[1] + before[1]))
                break
        if found is None:
            break  # isolated pixel, nothing to walk
        if found in seen:
            break  # back to an already-taken step: the loop is closed
        seen.add(found)
        contour.append(found[0])
        current, backtrack = found
    while len(contour) > 1 and contour[-1] == contour[0]:
        contour.pop()
    return contour


def perimeter(contour: list[tuple[int, int]]) -> float:
    """Length of the closed boundary walk: 1 per straight step,
    sqrt(2) per diagonal, including the step back to the start.

    A single-pixel contour has no steps to sum; it is scored as 4.0,
    the boundary of one unit square.
    """
    if len(contour) == 0:
        raise ValueError("perimeter of an empty contour is undefined")
    if len(contour) == 1:
        return 4.0
    pts = np.asarray(contour, dtype=np.float64)
    steps = np.diff(np.vstack([pts, pts[:1]]), axis=0)
    return float(np.hypot(steps[:, 0], steps[:, 1]).sum())


def circularity(area: float, perim: float) -> float:
    """4*pi*area / perimeter^2: 1 for a disk, smaller for rough shapes."""
    if perim <= 0:
        raise ValueError(f"perimeter must be positive, got {perim}")
    if area < 0:
        raise ValueError(f"area must be >= 0, got {area}")
    return 4.0 * math.pi * area / (perim * perim)


@dataclass(frozen=True)
class CellMeasurement:
    frame_index: int
    timestamp: float  # minutes
    area: int  # pixels
    perimeter: float  # pixels
    circularity: float
    detected: bool


def measure_frame(
    result: SegmentationResult, frame_index: int, timestamp: float
) -> CellMeasurement:
    """Morphometrics for one segmented frame.

    Frames where segmentation found nothing come back with
    detected=False and zeroed shape numbers, so a sequence keeps one
    record per frame no matter what.
    """
    if result.object_area == 0:
        return CellMeasurement(frame_index, timestamp, 0, 0.0, 0.0, False)
    contour = trace_contour(result.mask)
    perim = perimeter(contour)
    return CellMeasurement(
        frame_index=frame_index,
        timestamp=timestamp,
        area=result.object_area,
        perimeter=perim,
        circularity=circularity(result.object_area, perim),
        detected=True,
    )


@dataclass(frozen=True)
class PopulationCurve:
    """Fraction of cells counted as fully spread at each timestamp."""

    points: tuple[tuple[float, float], ...]  # (timestamp, fraction)
    spread_fraction_threshold: float

    @property
    def timestamps(self) -> list[float]:
        return [t for t, _ in self.points]

    @property
    def fractions(self) -> list[float]:
        return [f for _, f in self.points]


def population_curve(
    series: list[list[CellMeasurement]], spread_fraction_threshold: float = 0.95
) -> PopulationCurve:
    """Cohort spreading kinetics from per-cell measurement series.

    A cell counts as fully spread from the first frame where its area
    reaches `spread_fraction_threshold` of its own maximum over the series; from
    then on it stays counted.  Cells never detected in any frame never
    reach that point.  All series must share the same timestamps.
    """
    if not series:
        raise ValueError("need at least one cell series")
    if any(len(s) == 0 for s in series):
        raise ValueError("every cell series needs at least one frame")
    if not 0.0 < spread_fraction_threshold <= 1.0:
        raise ValueError(
            f"spread_fraction_threshold must lie in (0, 1], got {spread_fraction_threshold}"
        )
    timestamps = [m.timestamp for m in series[0]]
    for s in series[1:]:
        if [m.timestamp for m in s] != timestamps:
            raise ValueError("cell series must share identical timestamps")
    reached_at: list[float | None] = []
    for s in series:
        peak = max(m.area for m in s)
        when = None
        if peak > 0:
            for m in s:
                if m.area >= spread_fraction_threshold * peak:
                    when = m.timestamp
                    break
        reached_at.append(when)
    n = len(series)
    points = tuple(
        (t, sum(1 for w in reached_at if w is not None and w <= t) / n)
        for t in timestamps
    )
    return PopulationCurve(points=points, spread_fraction_threshold=spread_fraction_threshold)


@dataclass(frozen=True)
class EvalResult:
    dice: float
    iou: float
    perimeter_rel_error: float


def mask_perimeter(mask: np.ndarray) -> float:
    """Boundary length of the mask's largest object; 0 for empty masks."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return 0.0
    return perimeter(trace_contour(largest_object(mask)))


def evaluate(mask: np.ndarray, truth: np.ndarray) -> EvalResult:
    """Overlap and boundary agreement of a predicted mask against truth.

    Dice = 2|A∩B| / (|A|+|B|), IoU = |A∩B| / |A∪B|; two empty masks
    agree perfectly by convention.  The perimeter error is relative to
    the truth perimeter (infinite when truth is empty but the
    prediction is not).
    """
    mask = np.asarray(mask, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if mask.shape != truth.shape:
        raise ValueError(f"shape mismatch: mask {mask.shape} vs truth {truth.shape}")
    n_mask = int(mask.sum())
    n_truth = int(truth.sum())
    overlap = int((mask & truth).sum())
    if n_mask == 0 and n_truth == 0:
        return EvalResult(dice=1.0, iou=1.0, perimeter_rel_error=0.0)
    dice = 2.0 * overlap / (n_mask + n_truth)
    iou = overlap / (n_mask + n_truth - overlap)
    p_mask = mask_perimeter(mask)
    p_truth = mask_perimeter(truth)
    if p_truth == 0.0:
        rel = 0.0 if p_mask == 0.0 else math.inf
    else:
        rel = abs(p_mask - p_truth) / p_truth
    return EvalResult(dice=dice, iou=iou, perimeter_rel_error=rel)
