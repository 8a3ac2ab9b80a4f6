"""Intensity-domain preprocessing for DIC cell frames.

The chain roughly mimics how a human traces a cell boundary on a DIC
image: illumination removal (difference of Gaussians), edge-preserving
denoise (similarity-gated 3x3 averaging), region smoothing (Kuwahara),
boundary emphasis (local standard deviation) and, for hand-tuned single
frames, a frequency-domain band-pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.ndimage import gaussian_filter

from .image_io import normalize


@dataclass(frozen=True)
class FlatFieldParams:
    """Scales for background flattening: keep structure between the
    two Gaussian blur radii, discard slower illumination drift."""

    sigma_small: float = 2.5
    sigma_large: float = 30.0

    def __post_init__(self):
        if not (0 < self.sigma_small < self.sigma_large):
            raise ValueError(
                "flat-field sigmas must satisfy 0 < sigma_small < "
                f"sigma_large, got {self.sigma_small} and {self.sigma_large}"
            )


@dataclass(frozen=True)
class GNeighborParams:
    threshold_override: float | None = None

    def __post_init__(self):
        if self.threshold_override is not None and self.threshold_override < 0:
            raise ValueError(
                f"similarity threshold must be >= 0, got {self.threshold_override}"
            )


@dataclass(frozen=True)
class BandPassParams:
    """Gaussian band-pass cutoffs, as radii in spectrum pixels."""

    d1: float
    d2: float = 0.0

    def __post_init__(self):
        if not (self.d1 > self.d2 >= 0):
            raise ValueError(
                f"band-pass cutoffs must satisfy d1 > d2 >= 0, "
                f"got d1={self.d1}, d2={self.d2}"
            )


def _check_min_size(img: np.ndarray, side: int = 3) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < side or img.shape[1] < side:
        raise ValueError(
            f"need a 2-D image of at least {side}x{side} pixels, "
            f"got shape {getattr(img, 'shape', None)}"
        )
    return img


def flat_field_correct(
    img: np.ndarray, params: FlatFieldParams | None = None
) -> np.ndarray:
    """Difference-of-Gaussians shading correction, rescaled to [0, 1].

    Subtracting a wide blur from a narrow one cancels any illumination
    component that is smooth at the large scale -- a linear shading
    ramp is removed exactly away from the borders, because both blurs
    reproduce it there and the difference cancels.
    """
    params = params or FlatFieldParams()
    img = _check_min_size(img)
    fine = gaussian_filter(img, params.sigma_small, mode="mirror")
    coarse = gaussian_filter(img, params.sigma_large, mode="mirror")
    return normalize(fine - coarse)


def g_neighbor_threshold(img: np.ndarray) -> float:
    """Auto similarity threshold: square of the mean local contrast.

    Over every 3x3 window centred on an interior pixel, take the window
    maximum and minimum; the threshold is (mean of maxima - mean of
    minima) squared.  Flat images give 0, so smoothing then keeps
    every neighbor.
    """
    img = _check_min_size(img)
    windows = sliding_window_view(img, (3, 3))
    mean_max = float(windows.max(axis=(-2, -1)).mean())
    mean_min = float(windows.min(axis=(-2, -1)).mean())
    return (mean_max - mean_min) ** 2


_NEIGHBOR_OFFSETS = (
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1),           (0, 1),
    (1, -1),  (1, 0),  (1, 1),
)


def g_neighbor_smooth(
    img: np.ndarray, params: GNeighborParams | None = None
) -> np.ndarray:
    """Average each interior pixel with its similar 8-neighbors.

    A neighbor participates only when its absolute difference from the
    centre is within the similarity threshold (auto-computed per image
    unless overridden); weights are uniform over the participants, and
    the centre always participates, so a pixel with no similar
    neighbors passes through unchanged.  The one-pixel border is
    copied as-is.
    """
    params = params or GNeighborParams()
    img = _check_min_size(img)
    thr = params.threshold_override
    if thr is None:
        thr = g_neighbor_threshold(img)
    rows, cols = img.shape
    centre = img[1:-1, 1:-1]
    total = centre.copy()
    count = np.ones_like(centre)
    for dr, dc in _NEIGHBOR_OFFSETS:
        neighbor = img[1 + dr : rows - 1 + dr, 1 + dc : cols - 1 + dc]
        similar = np.abs(neighbor - centre) <= thr
        total += np.where(similar, neighbor, 0.0)
        count += similar
    out = img.copy()
    out[1:-1, 1:-1] = total / count
    return out


def kuwahara(img: np.ndarray, window: int = 5) -> np.ndarray:
    """Kuwahara smoothing: each pixel takes the mean of the least-variant
    of its four overlapping quadrants.

    With half-width k = window // 2 the quadrants are the four
    (k+1)x(k+1) corners of the window, sharing the centre row and
    column.  Ties on variance resolve in the fixed order NW, NE, SW,
    SE.  Borders see the image reflected.
    """
    if window < 5 or window % 2 == 0:
        raise ValueError(f"window must be odd and >= 5, got {window}")
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or min(img.shape) <= window:
        raise ValueError(
            f"image must be larger than the {window}x{window} window, "
            f"got shape {getattr(img, 'shape', None)}"
        )
    k = window // 2
    padded = np.pad(img, k, mode="reflect")
    quads = sliding_window_view(padded, (k + 1, k + 1))
    means = quads.mean(axis=(-2, -1))
    variances = quads.var(axis=(-2, -1))
    rows, cols = img.shape
    # top-left corner of each quadrant, relative to the padded pixel
    corners = ((0, 0), (0, k), (k, 0), (k, k))  # NW, NE, SW, SE
    mean_stack = np.stack([means[r : r + rows, c : c + cols] for r, c in corners])
    var_stack = np.stack(
        [variances[r : r + rows, c : c + cols] for r, c in corners]
    )
    pick = np.argmin(var_stack, axis=0)  # first minimum wins the tie
    return np.take_along_axis(mean_stack, pick[None], axis=0)[0]


def local_stddev(img: np.ndarray, window: int = 3) -> np.ndarray:
    """Population standard deviation over a sliding window, normalized.

    Uniform regions go to 0 and boundaries light up, turning an object
    edge into a bright ridge; the output is rescaled to span [0, 1].
    Borders see the image reflected.
    """
    if window < 3 or window % 2 == 0:
        raise ValueError(f"window must be odd and >= 3, got {window}")
    img = _check_min_size(img)
    k = window // 2
    if k >= min(img.shape):
        raise ValueError(
            f"image {img.shape} too small for a {window}x{window} window"
        )
    padded = np.pad(img, k, mode="reflect")
    windows = sliding_window_view(padded, (window, window))
    return normalize(windows.std(axis=(-2, -1)))


def bandpass_transfer(shape: tuple[int, int], d1: float, d2: float) -> np.ndarray:
    """Centred band-pass transfer function for an even-sized spectrum.

    H(u, v) = exp(-D^2 / (2 d1^2)) - exp(-D^2 / (2 d2^2)) with D the
    Euclidean distance from the spectrum centre (index n // 2 on each
    axis).  d2 = 0 is taken as the limit where the second term is 1 at
    the centre and 0 elsewhere, so H always vanishes at the centre and
    the mean level is discarded.
    """
    if not (d1 > d2 >= 0):
        raise ValueError(f"cutoffs must satisfy d1 > d2 >= 0, got {d1}, {d2}")
    rows, cols = shape
    dy = np.arange(rows, dtype=np.float64) - rows // 2
    dx = np.arange(cols, dtype=np.float64) - cols // 2
    dist_sq = dy[:, None] ** 2 + dx[None, :] ** 2
    keep = np.exp(-dist_sq / (2.0 * d1 * d1))
    if d2 == 0:
        cut = (dist_sq == 0).astype(np.float64)
    else:
        cut = np.exp(-dist_sq / (2.0 * d2 * d2))
    return keep - cut


def fft_bandpass(
    img: np.ndarray,
    params: BandPassParams,
    normalize_output: bool = True,
) -> np.ndarray:
    """Apply the Gaussian band-pass in the frequency domain.

    Odd dimensions are zero-padded to even before the transform and the
    result is cropped back.  The filtered image is the real part of the
    inverse transform, rescaled to [0, 1] unless `normalize_output` is
    False (useful when the raw linear response is wanted).
    """
    img = _check_min_size(img)
    rows, cols = img.shape
    prows, pcols = rows + rows % 2, cols + cols % 2
    work = img
    if (prows, pcols) != (rows, cols):
        work = np.zeros((prows, pcols), dtype=np.float64)
        work[:rows, :cols] = img
    spectrum = np.fft.fftshift(np.fft.fft2(work))
    spectrum *= bandpass_transfer((prows, pcols), params.d1, params.d2)
    filtered = np.fft.ifft2(np.fft.ifftshift(spectrum)).real
    filtered = filtered[:rows, :cols]
    if normalize_output:
        return normalize(filtered)
    return filtered
