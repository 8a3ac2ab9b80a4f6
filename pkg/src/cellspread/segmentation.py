"""Threshold and binary-morphology segmentation of filtered frames.

The boundary-emphasis filter turns a cell into a bright ridge along
its edge; thresholding leaves a (possibly broken) ring which a short
sequence of morphological steps turns into a solid single object.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

_EIGHT_CONNECTED = np.ones((3, 3), dtype=int)


def binarize(img: np.ndarray, threshold: float) -> np.ndarray:
    """Foreground = strictly above the threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    return np.asarray(img, dtype=np.float64) > threshold


def otsu_threshold(img: np.ndarray) -> float:
    """Between-class-variance-maximizing threshold over a 256-bin
    histogram of [0, 1].

    Returns the upper edge of the last background bin, so `binarize`
    with the returned value splits the classes as scored.  Ties pick
    the lowest threshold.  Constant images have no two classes to
    separate and raise ValueError.
    """
    img = np.asarray(img, dtype=np.float64)
    if float(img.min()) == float(img.max()):
        raise ValueError("threshold of a constant image is undefined")
    hist, edges = np.histogram(img, bins=256, range=(0.0, 1.0))
    hist = hist.astype(np.float64)
    centers = (edges[:-1] + edges[1:]) / 2.0
    weight_lo = np.cumsum(hist)
    weight_hi = weight_lo[-1] - weight_lo
    mass_lo = np.cumsum(hist * centers)
    mass_total = mass_lo[-1]
    valid = (weight_lo > 0) & (weight_hi > 0)
    mean_lo = np.divide(mass_lo, weight_lo, out=np.zeros_like(mass_lo), where=valid)
    mean_hi = np.divide(
        mass_total - mass_lo, weight_hi, out=np.zeros_like(mass_lo), where=valid
    )
    score = np.where(valid, weight_lo * weight_hi * (mean_lo - mean_hi) ** 2, -1.0)
    best = int(np.argmax(score))  # first maximum = lowest threshold
    return float(edges[best + 1])


def disk_element(radius: int) -> np.ndarray:
    """Disk structuring element: offsets with dx^2 + dy^2 <= r^2."""
    if not 1 <= radius <= 3:
        raise ValueError(
            f"structuring-element radius must be between 1 and 3, got {radius}"
        )
    r = int(radius)
    dy, dx = np.mgrid[-r : r + 1, -r : r + 1]
    return (dy * dy + dx * dx) <= r * r


def erode(mask: np.ndarray, radius: int) -> np.ndarray:
    """Binary erosion by a disk; beyond the border counts as background."""
    return ndimage.binary_erosion(
        np.asarray(mask, dtype=bool), structure=disk_element(radius), border_value=0
    )


def dilate(mask: np.ndarray, radius: int) -> np.ndarray:
    """Binary dilation by a disk; beyond the border counts as background."""
    return ndimage.binary_dilation(
        np.asarray(mask, dtype=bool), structure=disk_element(radius), border_value=0
    )


def close(mask: np.ndarray, radius: int) -> np.ndarray:
    """Dilation followed by erosion with the same disk: bridges gaps
    narrower than the element without growing the object overall."""
    return erode(dilate(mask, radius), radius)


def fill_holes(mask: np.ndarray) -> np.ndarray:
    """Fill background regions not connected (4-connectivity) to the border."""
    return ndimage.binary_fill_holes(np.asarray(mask, dtype=bool))


def _label(mask: np.ndarray) -> tuple[np.ndarray, int]:
    return ndimage.label(np.asarray(mask, dtype=bool), structure=_EIGHT_CONNECTED)


def largest_object(mask: np.ndarray) -> np.ndarray:
    """Keep only the largest 8-connected component.

    An empty mask stays empty.  On ties the component whose first pixel
    comes earliest in row-major order wins (labels are assigned in scan
    order, and the first maximal count is taken).
    """
    mask = np.asarray(mask, dtype=bool)
    labels, count = _label(mask)
    if count == 0:
        return np.zeros_like(mask)
    sizes = np.bincount(labels.ravel())[1:]
    winner = int(np.argmax(sizes)) + 1
    return labels == winner


def remove_specks(mask: np.ndarray, min_area: int) -> np.ndarray:
    """Drop every 8-connected component smaller than `min_area` pixels."""
    if min_area < 0:
        raise ValueError(f"min_area must be >= 0, got {min_area}")
    mask = np.asarray(mask, dtype=bool)
    if min_area == 0:
        return mask.copy()
    labels, count = _label(mask)
    if count == 0:
        return mask.copy()
    sizes = np.bincount(labels.ravel())
    small = sizes < min_area
    small[0] = False
    return mask & ~small[labels]


# steps that take a radius / area argument vs. bare steps
_ARG_STEPS = {"erode", "close", "remove_specks"}
_BARE_STEPS = {"fill_holes", "largest_object"}


def _parse_step(step: str) -> tuple[str, int | None]:
    name, _, arg = step.partition(":")
    name = name.strip()
    if name in _BARE_STEPS:
        if arg:
            raise ValueError(f"step {name!r} takes no argument, got {step!r}")
        return name, None
    if name in _ARG_STEPS:
        try:
            value = int(arg)
        except ValueError:
            raise ValueError(
                f"step {step!r} needs an integer argument, e.g. '{name}:1'"
            ) from None
        if name in ("erode", "close") and not 1 <= value <= 3:
            raise ValueError(
                f"radius for {name!r} must be between 1 and 3, got {value}"
            )
        if name == "remove_specks" and value < 0:
            raise ValueError(f"area for remove_specks must be >= 0, got {value}")
        return name, value
    raise ValueError(
        f"unknown morphology step {step!r}; expected one of "
        "erode:<r>, close:<r>, fill_holes, remove_specks:<area>, largest_object"
    )


@dataclass(frozen=True)
class MorphologyPlan:
    """Ordered list of cleanup steps applied after thresholding.

    Steps are written as strings -- "erode:1", "close:3", "fill_holes",
    "remove_specks:40", "largest_object" -- so plans round-trip through
    JSON configs verbatim.  The default turns a boundary ridge into a
    solid object: a light erosion peels threshold noise, closing heals
    the ring, hole filling solidifies it, and the final erosion undoes
    the outward bias of the ridge.
    """

    steps: tuple[str, ...] = (
        "erode:1",
        "close:3",
        "fill_holes",
        "erode:1",
        "largest_object",
    )

    def __post_init__(self):
        if not self.steps:
            raise ValueError("morphology plan must contain at least one step")
        object.__setattr__(self, "steps", tuple(self.steps))
        parsed = [_parse_step(s) for s in self.steps]
        if sum(1 for name, _ in parsed if name == "largest_object") > 1:
            raise ValueError("plan may select the largest object only once")

    def resolved(self, speck_min_area: int = 0) -> list[tuple[str, int | None]]:
        """Executable (name, arg) list.  Guarantees a single
        largest-object selection (appended when missing) and, when a
        speck area is configured and the plan has no explicit
        remove_specks, inserts one just before that selection."""
        parsed = [_parse_step(s) for s in self.steps]
        if all(name != "largest_object" for name, _ in parsed):
            parsed.append(("largest_object", None))
        has_speck = any(name == "remove_specks" for name, _ in parsed)
        if speck_min_area > 0 and not has_speck:
            at = next(
                i for i, (name, _) in enumerate(parsed) if name == "largest_object"
            )
            parsed.insert(at, ("remove_specks", int(speck_min_area)))
        return parsed

    def apply(self, mask: np.ndarray, speck_min_area: int = 0) -> np.ndarray:
        out = np.asarray(mask, dtype=bool)
        for name, arg in self.resolved(speck_min_area):
            if name == "erode":
                out = erode(out, arg)
            elif name == "close":
                out = close(out, arg)
            elif name == "fill_holes":
                out = fill_holes(out)
            elif name == "remove_specks":
                out = remove_specks(out, arg)
            else:
                out = largest_object(out)
        return out


@dataclass(frozen=True)
class SegmentationResult:
    mask: np.ndarray
    object_area: int
    threshold_used: float

    def __post_init__(self):
        if self.object_area != int(np.count_nonzero(self.mask)):
            raise ValueError("object_area does not match the mask")


def segment(
    img: np.ndarray,
    threshold: float,
    plan: MorphologyPlan | None = None,
    speck_min_area: int = 0,
) -> SegmentationResult:
    """Threshold a filtered frame and clean it up into one object.

    A frame where nothing survives is a legitimate outcome (the cell
    may not have attached yet) and comes back with area 0 rather than
    raising.
    """
    plan = plan or MorphologyPlan()
    mask = plan.apply(binarize(img, threshold), speck_min_area)
    return SegmentationResult(
        mask=mask,
        object_area=int(np.count_nonzero(mask)),
        threshold_used=float(threshold),
    )
