"""Frame and mask I/O for DIC time-lapse sequences.

Frames arrive as single-channel 8- or 16-bit PNGs and travel through
the toolkit as float64 arrays scaled to [0, 1].  Masks are boolean
arrays, stored on disk as 8-bit PNGs with foreground = 255.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

# 16-bit grayscale shows up under a few PIL mode names depending on
# byte order and how the file was written.
_SIXTEEN_BIT_MODES = {"I", "I;16", "I;16B", "I;16L", "I;16N"}


class ImageFormatError(ValueError):
    """The PNG on disk is not something the pipeline accepts."""


class EmptySequenceError(RuntimeError):
    """A directory yielded no frames for the requested pattern."""


@dataclass(frozen=True)
class FrameRef:
    """One frame of a sorted sequence: position, acquisition time, file."""

    index: int
    timestamp: float  # minutes since the first frame
    path: Path


@dataclass(frozen=True)
class FrameSequence:
    frames: tuple[FrameRef, ...]
    interval: float = 10.0

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)

    def __getitem__(self, i: int) -> FrameRef:
        return self.frames[i]


def load_frame(path: str | Path) -> np.ndarray:
    """Read a single-channel PNG into a float64 array in [0, 1].

    Pixel values are divided by the maximum of the source bit depth
    (255 or 65535), so the scale of the original acquisition is kept --
    no per-image stretching happens here.  Multi-channel images are
    rejected with the channel count in the message.
    """
    path = Path(path)
    with Image.open(path) as im:
        bands = im.getbands()
        if len(bands) != 1 or im.mode == "P":
            raise ImageFormatError(
                f"{path.name}: expected a single-channel PNG, "
                f"got {len(bands)} channel(s) (mode {im.mode!r})"
            )
        if im.mode == "L":
            max_value = 255.0
        elif im.mode in _SIXTEEN_BIT_MODES:
            max_value = 65535.0
        else:
            raise ImageFormatError(
                f"{path.name}: unsupported pixel format {im.mode!r}; "
                "expected 8- or 16-bit grayscale"
            )
        data = np.asarray(im, dtype=np.float64)
    return data / max_value


def normalize(img: np.ndarray) -> np.ndarray:
    """Affinely rescale to span [0, 1]; a constant image maps to zeros.

    Applying it twice equals applying it once (the second pass sees
    min 0 and max 1 and leaves values untouched).
    """
    img = np.asarray(img, dtype=np.float64)
    lo = float(img.min())
    hi = float(img.max())
    if hi == lo:
        return np.zeros_like(img)
    return (img - lo) / (hi - lo)


def crop(img: np.ndarray, x: int, y: int, w: int, h: int) -> np.ndarray:
    """Cut the axis-aligned rectangle (x, y, w, h) out of `img`.

    Pure indexing -- no resampling.  Rectangles that stick out of the
    image raise ValueError naming the offending numbers.
    """
    rows, cols = img.shape
    if w <= 0 or h <= 0 or x < 0 or y < 0 or x + w > cols or y + h > rows:
        raise ValueError(
            f"crop rectangle x={x} y={y} w={w} h={h} does not fit a "
            f"{cols}x{rows} image"
        )
    return img[y : y + h, x : x + w].copy()


# last run of digits in the stem, e.g. "cell3_frame012" -> 12
_INDEX_RE = re.compile(r"(\d+)(?!.*\d)")


def frame_number(path: str | Path) -> int | None:
    """Number embedded in a frame filename (last digit run), or None."""
    m = _INDEX_RE.search(Path(path).stem)
    return int(m.group(1)) if m else None


def load_sequence(
    directory: str | Path, pattern: str = "*.png", interval: float = 10.0
) -> FrameSequence:
    """Collect frames from a directory, ordered by the number embedded
    in each filename.

    The embedded number is only a sort key; frames are re-indexed from
    zero and timestamped as ``index * interval`` minutes, so the first
    frame is always t=0 regardless of how the files were numbered.
    """
    if interval <= 0:
        raise ValueError(f"frame interval must be positive, got {interval}")
    directory = Path(directory)
    paths = sorted(directory.glob(pattern))
    if not paths:
        raise EmptySequenceError(
            f"no frames matching {pattern!r} under {directory}"
        )
    keyed = []
    for p in paths:
        m = _INDEX_RE.search(p.stem)
        if m is None:
            raise ValueError(
                f"{p.name}: cannot order frame, no number in filename"
            )
        keyed.append((int(m.group(1)), p.name, p))
    keyed.sort(key=lambda t: (t[0], t[1]))
    frames = tuple(
        FrameRef(index=i, timestamp=i * interval, path=p)
        for i, (_, _, p) in enumerate(keyed)
    )
    return FrameSequence(frames=frames, interval=interval)


def save_mask(mask: np.ndarray, path: str | Path) -> None:
    """Write a boolean mask as an 8-bit PNG (foreground 255, rest 0)."""
    mask = np.asarray(mask, dtype=bool)
    Image.fromarray(mask.astype(np.uint8) * 255).save(
        Path(path), format="PNG"
    )


def load_mask(path: str | Path) -> np.ndarray:
    """Read a mask PNG back as booleans; any nonzero pixel is foreground.

    Ground-truth exports from annotation tools vary between 8- and
    16-bit and between {0,1} and {0,255} coding, so the lenient rule
    "nonzero means object" is applied.
    """
    return load_frame(path) > 0.0
