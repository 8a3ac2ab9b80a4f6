"""Report emission: delimited tables, masks, resolved config, figures.

`measurements.csv` is the canonical numeric output -- floats printed
with six fixed decimals so reruns are byte-identical.  Figures are a
convenience rendering of the same numbers and are not part of the
deterministic surface (PNG encoders embed varying metadata).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .config import PipelineConfig
from .image_io import save_mask
from .measure import CellMeasurement, PopulationCurve

if TYPE_CHECKING:  # pipeline imports this module; annotation only
    from .pipeline import EvalReport

_CSV_HEADER = (
    "frame",
    "timestamp_min",
    "area_px",
    "perimeter_px",
    "circularity",
    "detected",
)


@dataclass(frozen=True)
class SequenceReport:
    measurements: tuple[CellMeasurement, ...]
    masks: tuple[np.ndarray, ...]
    frame_names: tuple[str, ...]
    population: PopulationCurve | None
    config: PipelineConfig
    eval: EvalReport | None = None


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def write_measurements_csv(
    measurements: tuple[CellMeasurement, ...] | list[CellMeasurement],
    path: str | Path,
) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_HEADER)
        for m in measurements:
            writer.writerow(
                [
                    m.frame_index,
                    _fmt(m.timestamp),
                    m.area,
                    _fmt(m.perimeter),
                    _fmt(m.circularity),
                    int(m.detected),
                ]
            )


def read_measurements_csv(path: str | Path) -> list[CellMeasurement]:
    out: list[CellMeasurement] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != _CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        for row in reader:
            out.append(
                CellMeasurement(
                    frame_index=int(row[0]),
                    timestamp=float(row[1]),
                    area=int(row[2]),
                    perimeter=float(row[3]),
                    circularity=float(row[4]),
                    detected=bool(int(row[5])),
                )
            )
    return out


def write_population_csv(curve: PopulationCurve, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("timestamp_min", "fraction_spread"))
        for t, f in curve.points:
            writer.writerow([_fmt(t), _fmt(f)])


def _render_measurement_figure(
    measurements, path: str | Path
) -> None:
    times = [m.timestamp for m in measurements]
    areas = [m.area for m in measurements]
    circ = [m.circularity if m.detected else np.nan for m in measurements]
    fig, ax_area = plt.subplots(figsize=(7, 4.5))
    ax_area.plot(times, areas, "o-", color="tab:blue", label="area")
    ax_area.set_xlabel("time (min)")
    ax_area.set_ylabel("area (px)", color="tab:blue")
    ax_circ = ax_area.twinx()
    ax_circ.plot(times, circ, "s--", color="tab:orange", label="circularity")
    ax_circ.set_ylabel("circularity", color="tab:orange")
    ax_circ.set_ylim(0, 1.05)
    ax_area.set_title("Cell spreading over time")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def _render_population_figure(curve: PopulationCurve, path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.step(curve.timestamps, curve.fractions, where="post")
    ax.set_xlabel("time (min)")
    ax.set_ylabel("fraction fully spread")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(
        f"Population spreading (threshold {curve.spread_fraction_threshold:.2f} of own max)"
    )
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def emit_report(report: SequenceReport, out_dir: str | Path) -> None:
    """Write the whole result set under `out_dir`.

    Layout: measurements.csv, population.csv (when a curve exists),
    config.resolved.json, masks/<frame-stem>_<index>.png, and rendered
    figures under figures/.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_measurements_csv(report.measurements, out_dir / "measurements.csv")
    if report.population is not None:
        write_population_csv(report.population, out_dir / "population.csv")
    report.config.save(out_dir / "config.resolved.json")
    masks_dir = out_dir / "masks"
    masks_dir.mkdir(exist_ok=True)
    for name, index, mask in zip(
        report.frame_names,
        (m.frame_index for m in report.measurements),
        report.masks,
    ):
        save_mask(mask, masks_dir / f"{Path(name).stem}_{index}.png")
    figures_dir = out_dir / "figures"
    figures_dir.mkdir(exist_ok=True)
    if report.measurements:
        _render_measurement_figure(
            report.measurements, figures_dir / "measurements.png"
        )
    if report.population is not None:
        _render_population_figure(report.population, figures_dir / "population.png")
