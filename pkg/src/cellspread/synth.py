"""Synthetic DIC-like phantoms with exact ground truth.

Real spreading-assay recordings are not redistributable, so tests and
demos run on generated sequences instead: a lens-profile blob that
grows over time (the well-behaved case) and a "sombrero" cell -- a
bright core on a broad body barely above background -- which is the
classic hard case for a shared threshold.

All generators are deterministic for a given seed.  `write_sequence`
stores frames as 16-bit PNGs next to a `truth/` directory of masks, so
a directory produced here can be fed straight to the batch CLI and
then scored with `eval`.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np
from PIL import Image

from .image_io import save_mask


def _distance(shape: tuple[int, int], center: tuple[float, float]) -> np.ndarray:
    rows, cols = shape
    cy, cx = center
    yy = np.arange(rows, dtype=np.float64)[:, None] - cy
    xx = np.arange(cols, dtype=np.float64)[None, :] - cx
    return np.hypot(yy, xx)


def lens_profile(
    shape: tuple[int, int],
    center: tuple[float, float],
    radius: float,
    amplitude: float,
) -> np.ndarray:
    """Half-lens intensity bump: amplitude * sqrt(1 - (d/r)^2) inside
    the disk, 0 outside.  The profile plunges steeply at the rim, the
    way a rounded cell edge does under DIC."""
    dist = _distance(shape, center)
    arg = 1.0 - (dist / radius) ** 2
    return amplitude * np.sqrt(np.clip(arg, 0.0, None))


def shading_ramp(shape: tuple[int, int], slope_x: float, slope_y: float) -> np.ndarray:
    """Linear illumination ramp, zero-mean across the frame."""
    rows, cols = shape
    gy = (np.arange(rows, dtype=np.float64)[:, None] / max(rows - 1, 1)) - 0.5
    gx = (np.arange(cols, dtype=np.float64)[None, :] / max(cols - 1, 1)) - 0.5
    return slope_y * gy + slope_x * gx


def blob_frame(
    shape: tuple[int, int] = (300, 300),
    center: tuple[float, float] | None = None,
    radius: float = 60.0,
    amplitude: float = 0.15,
    background: float = 0.45,
    ramp: tuple[float, float] = (0.08, 0.05),
    noise_sigma: float = 0.03,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """One spreading-cell frame plus its ground-truth mask."""
    if center is None:
        center = ((shape[0] - 1) / 2.0, (shape[1] - 1) / 2.0)
    rng = rng or np.random.default_rng(0)
    img = (
        background
        + lens_profile(shape, center, radius, amplitude)
        + shading_ramp(shape, *ramp)
        + rng.normal(0.0, noise_sigma, shape)
    )
    truth = _distance(shape, center) <= radius
    return np.clip(img, 0.0, 1.0), truth


def spreading_radii(
    n_frames: int, radius_start: float = 26.0, radius_end: float = 88.0
) -> list[float]:
    """Radius schedule of a spreading cell: quick early growth easing
    into a plateau (saturating exponential)."""
    if n_frames < 1:
        raise ValueError("need at least one frame")
    t = np.arange(n_frames, dtype=np.float64)
    tau = max(n_frames / 3.0, 1.0)
    growth = 1.0 - np.exp(-t / tau)
    growth /= growth[-1] if n_frames > 1 else 1.0
    return list(radius_start + (radius_end - radius_start) * growth)


def spreading_sequence(
    n_frames: int = 40,
    shape: tuple[int, int] = (300, 300),
    seed: int = 7,
    radius_start: float | None = None,
    radius_end: float | None = None,
    **frame_kwargs,
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Deterministic growing-blob sequence: list of (frame, truth).

    Unless given explicitly, the radius schedule scales with the frame
    so smaller test images hold the same relative geometry (26→88 px
    on the default 300×300 field)."""
    scale = min(shape) / 300.0
    if radius_start is None:
        radius_start = 26.0 * scale
    if radius_end is None:
        radius_end = 88.0 * scale
    rng = np.random.default_rng(seed)
    frames = []
    for radius in spreading_radii(n_frames, radius_start, radius_end):
        frames.append(blob_frame(shape=shape, radius=radius, rng=rng, **frame_kwargs))
    return frames


def sombrero_frame(
    shape: tuple[int, int] = (300, 300),
    center: tuple[float, float] | None = None,
    body_radius: float = 70.0,
    body_amplitude: float = 0.05,
    core_radius: float = 22.0,
    core_amplitude: float = 0.30,
    background: float = 0.45,
    ramp: tuple[float, float] = (0.08, 0.05),
    noise_sigma: float = 0.03,
    seed: int = 21,
) -> tuple[np.ndarray, np.ndarray]:
    """A cell whose spread body sits barely above background while the
    nucleus-side core glows: in profile, a sombrero.  Ground truth is
    the full body.  Shared batch settings typically latch onto the core
    and miss the faint brim; these frames are what per-frame band-pass
    tuning is for."""
    if center is None:
        center = ((shape[0] - 1) / 2.0, (shape[1] - 1) / 2.0)
    rng = np.random.default_rng(seed)
    dist = _distance(shape, center)
    body = np.where(dist <= body_radius, body_amplitude, 0.0)
    img = (
        background
        + body
        + lens_profile(shape, center, core_radius, core_amplitude)
        + shading_ramp(shape, *ramp)
        + rng.normal(0.0, noise_sigma, shape)
    )
    truth = dist <= body_radius
    return np.clip(img, 0.0, 1.0), truth


def write_frame_png(img: np.ndarray, path: str | Path) -> None:
    """Store a [0, 1] image as a 16-bit grayscale PNG."""
    data = np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0)
    scaled = np.round(data * 65535.0).astype(np.uint16)
    Image.fromarray(scaled).save(Path(path), format="PNG")


def write_sequence(
    frames: list[tuple[np.ndarray, np.ndarray]],
    directory: str | Path,
    stem: str = "frame",
) -> list[Path]:
    """Write frames as <stem>_<index>.png (zero-based, zero-padded)
    with matching truth masks under <directory>/truth/.

    Truth masks are named the way the batch report names its masks
    (`<frame-stem>_<frame-index>.png`) so `eval --pred <out>/masks
    --truth <data>/truth` pairs them up with no renaming."""
    directory = Path(directory)
    truth_dir = directory / "truth"
    directory.mkdir(parents=True, exist_ok=True)
    truth_dir.mkdir(exist_ok=True)
    paths = []
    for i, (img, truth) in enumerate(frames):
        name = f"{stem}_{i:03d}.png"
        write_frame_png(img, directory / name)
        save_mask(truth, truth_dir / f"{stem}_{i:03d}_{i}.png")
        paths.append(directory / name)
    return paths


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        description="Generate a demo spreading sequence with ground truth."
    )
    parser.add_argument("out_dir", help="directory to write frames into")
    parser.add_argument("--frames", type=int, default=40)
    parser.add_argument("--size", type=int, default=300)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument(
        "--sombrero",
        action="store_true",
        help="also write one hard sombrero frame as sombrero_000.png",
    )
    args = parser.parse_args(argv)
    frames = spreading_sequence(
        n_frames=args.frames, shape=(args.size, args.size), seed=args.seed
    )
    paths = write_sequence(frames, args.out_dir)
    print(f"wrote {len(paths)} frames under {args.out_dir}")
    if args.sombrero:
        img, truth = sombrero_frame(shape=(args.size, args.size))
        out = Path(args.out_dir) / "sombrero"
        out.mkdir(exist_ok=True)
        write_frame_png(img, out / "sombrero_000.png")
        save_mask(truth, out / "truth_sombrero_000.png")
        print(f"wrote hard frame under {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
