"""Independent brute-force oracles used by the unit and acceptance tests.

Everything here is written as plain loops over pixel coordinates (or
tiny BFS queues), deliberately avoiding the vectorized/library routes
the package itself takes, so a bug in the implementation cannot hide in
its own mirror image.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np


# ---- filter oracles -------------------------------------------------------


def oracle_g_threshold(img: np.ndarray) -> float:
    h, w = img.shape
    maxes: list[float] = []
    mins: list[float] = []
    for r in range(1, h - 1):
        for c in range(1, w - 1):
            win = [
                float(img[rr, cc])
                for rr in (r - 1, r, r + 1)
                for cc in (c - 1, c, c + 1)
            ]
            maxes.append(max(win))
            mins.append(min(win))
    return (sum(maxes) / len(maxes) - sum(mins) / len(mins)) ** 2


def oracle_g_smooth(img: np.ndarray, threshold: float) -> np.ndarray:
    out = np.array(img, dtype=np.float64, copy=True)
    h, w = img.shape
    for r in range(1, h - 1):
        for c in range(1, w - 1):
            centre = float(img[r, c])
            vals = [centre]
            for dr in (-1, 0, 1):
                for dc in (-1, 0, 1):
                    if dr == 0 and dc == 0:
                        continue
                    v = float(img[r + dr, c + dc])
                    if abs(v - centre) <= threshold:
                        vals.append(v)
            out[r, c] = sum(vals) / len(vals)
    return out


def oracle_kuwahara(img: np.ndarray, window: int) -> np.ndarray:
    k = window // 2
    padded = np.pad(img, k, mode="reflect")
    h, w = img.shape
    out = np.empty((h, w), dtype=np.float64)
    for r in range(h):
        for c in range(w):
            pr, pc = r + k, c + k
            quadrants = [
                padded[pr - k : pr + 1, pc - k : pc + 1],  # NW
                padded[pr - k : pr + 1, pc : pc + k + 1],  # NE
                padded[pr : pr + k + 1, pc - k : pc + 1],  # SW
                padded[pr : pr + k + 1, pc : pc + k + 1],  # SE
            ]
            best_var = None
            best_mean = None
            for q in quadrants:  # first strict minimum wins ties
                v = float(np.var(q))
                if best_var is None or v < best_var:
                    best_var = v
                    best_mean = float(np.mean(q))
            out[r, c] = best_mean
    return out


def oracle_local_stddev(img: np.ndarray, window: int) -> np.ndarray:
    k = window // 2
    padded = np.pad(img, k, mode="reflect")
    h, w = img.shape
    raw = np.empty((h, w), dtype=np.float64)
    for r in range(h):
        for c in range(w):
            win = padded[r : r + window, c : c + window]
            m = float(win.sum()) / win.size
            raw[r, c] = math.sqrt(float(((win - m) ** 2).sum()) / win.size)
    lo, hi = raw.min(), raw.max()
    if hi == lo:
        return np.zeros_like(raw)
    return (raw - lo) / (hi - lo)


# ---- morphology oracles ---------------------------------------------------


def disk_offsets(radius: int) -> list[tuple[int, int]]:
    return [
        (dy, dx)
        for dy in range(-radius, radius + 1)
        for dx in range(-radius, radius + 1)
        if dy * dy + dx * dx <= radius * radius
    ]


def oracle_dilate(mask: np.ndarray, radius: int) -> np.ndarray:
    h, w = mask.shape
    out = np.zeros((h, w), dtype=bool)
    offs = disk_offsets(radius)
    for r in range(h):
        for c in range(w):
            if mask[r, c]:
                for dy, dx in offs:
                    rr, cc = r + dy, c + dx
                    if 0 <= rr < h and 0 <= cc < w:
                        out[rr, cc] = True
    return out


def oracle_erode(mask: np.ndarray, radius: int) -> np.ndarray:
    h, w = mask.shape
    out = np.zeros((h, w), dtype=bool)
    offs = disk_offsets(radius)
    for r in range(h):
        for c in range(w):
            keep = True
            for dy, dx in offs:
                rr, cc = r + dy, c + dx
                if not (0 <= rr < h and 0 <= cc < w and mask[rr, cc]):
                    keep = False
                    break
            out[r, c] = keep
    return out


def oracle_close(mask: np.ndarray, radius: int) -> np.ndarray:
    return oracle_erode(oracle_dilate(mask, radius), radius)


def oracle_fill_holes(mask: np.ndarray) -> np.ndarray:
    """Flood the background from the border (4-connectivity); whatever
    background the flood never reaches is a hole."""
    h, w = mask.shape
    reached = np.zeros((h, w), dtype=bool)
    queue: deque[tuple[int, int]] = deque()
    for r in range(h):
        for c in (0, w - 1):
            if not mask[r, c] and not reached[r, c]:
                reached[r, c] = True
                queue.append((r, c))
    for c in range(w):
        for r in (0, h - 1):
            if not mask[r, c] and not reached[r, c]:
                reached[r, c] = True
                queue.append((r, c))
    while queue:
        r, c = queue.popleft()
        for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w and not mask[rr, cc] and not reached[rr, cc]:
                reached[rr, cc] = True
                queue.append((rr, cc))
    return mask | ~reached


def oracle_components(mask: np.ndarray) -> list[list[tuple[int, int]]]:
    """8-connected components in raster order of their first pixel."""
    h, w = mask.shape
    seen = np.zeros((h, w), dtype=bool)
    comps = []
    for r in range(h):
        for c in range(w):
            if mask[r, c] and not seen[r, c]:
                comp = []
                queue = deque([(r, c)])
                seen[r, c] = True
                while queue:
                    cr, cc = queue.popleft()
                    comp.append((cr, cc))
                    for dr in (-1, 0, 1):
                        for dc in (-1, 0, 1):
                            rr, cc2 = cr + dr, cc + dc
                            if (
                                0 <= rr < h
                                and 0 <= cc2 < w
                                and mask[rr, cc2]
                                and not seen[rr, cc2]
                            ):
                                seen[rr, cc2] = True
                                queue.append((rr, cc2))
                comps.append(comp)
    return comps


def oracle_largest_object(mask: np.ndarray) -> np.ndarray:
    out = np.zeros_like(mask, dtype=bool)
    comps = oracle_components(mask)
    if not comps:
        return out
    best = None
    for comp in comps:  # first maximal size wins (raster order)
        if best is None or len(comp) > len(best):
            best = comp
    for r, c in best:
        out[r, c] = True
    return out


def oracle_remove_specks(mask: np.ndarray, min_area: int) -> np.ndarray:
    out = np.zeros_like(mask, dtype=bool)
    for comp in oracle_components(mask):
        if len(comp) >= min_area:
            for r, c in comp:
                out[r, c] = True
    return out


def oracle_otsu(img: np.ndarray) -> float:
    """Exhaustive scan over all 256 histogram splits, recomputing the
    class statistics from the bin contents each time."""
    hist, edges = np.histogram(img, bins=256, range=(0.0, 1.0))
    centers = [(edges[i] + edges[i + 1]) / 2.0 for i in range(256)]
    best_score, best_edge = None, None
    total = int(hist.sum())
    for k in range(256):
        n_lo = int(hist[: k + 1].sum())
        n_hi = total - n_lo
        if n_lo == 0 or n_hi == 0:
            continue
        mean_lo = sum(hist[i] * centers[i] for i in range(k + 1)) / n_lo
        mean_hi = sum(hist[i] * centers[i] for i in range(k + 1, 256)) / n_hi
        score = n_lo * n_hi * (mean_lo - mean_hi) ** 2
        if best_score is None or score > best_score:  # first max = lowest edge
            best_score = score
            best_edge = edges[k + 1]
    return float(best_edge)


# ---- geometry helpers -----------------------------------------------------


def raster_disk(radius: int, pad: int = 3) -> np.ndarray:
    size = 2 * (radius + pad) + 1
    centre = radius + pad
    yy, xx = np.mgrid[0:size, 0:size]
    return (yy - centre) ** 2 + (xx - centre) ** 2 <= radius * radius


def random_blob_mask(rng: np.random.Generator, size: int = 20) -> np.ndarray:
    """A random but structured mask: a few dilated random seeds."""
    mask = rng.random((size, size)) > 0.82
    grown = oracle_dilate(mask, 1)
    return grown
