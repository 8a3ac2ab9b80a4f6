"""Pipeline configuration: one dataclass, JSON on disk.

Everything the batch and single-frame runs need lives in
`PipelineConfig`; hand-tuned per-frame band-pass/threshold triplets sit
in `frame_overrides` keyed by frame index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .filters import BandPassParams, FlatFieldParams, GNeighborParams
from .segmentation import MorphologyPlan

_MODES = ("batch", "single")


@dataclass(frozen=True)
class FrameOverride:
    """Hand-tuned band-pass cutoffs and threshold for one frame."""

    d1: float
    d2: float
    threshold: float

    def __post_init__(self):
        BandPassParams(self.d1, self.d2)  # validates d1 > d2 >= 0
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(
                f"threshold must lie in [0, 1], got {self.threshold}"
            )

    @property
    def bandpass(self) -> BandPassParams:
        return BandPassParams(self.d1, self.d2)


@dataclass(frozen=True)
class PipelineConfig:
    mode: str = "batch"
    flat_field: FlatFieldParams = field(default_factory=FlatFieldParams)
    g_neighbor: GNeighborParams = field(default_factory=GNeighborParams)
    kuwahara_window: int = 5
    stddev_window: int = 3
    bandpass: BandPassParams | None = None
    threshold: float = 0.12
    morphology: MorphologyPlan = field(default_factory=MorphologyPlan)
    interval: float = 10.0
    speck_min_area: int = 0
    frame_overrides: dict[int, FrameOverride] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {self.threshold}")
        if self.kuwahara_window < 5 or self.kuwahara_window % 2 == 0:
            raise ValueError(
                f"kuwahara_window must be odd and >= 5, got {self.kuwahara_window}"
            )
        if self.stddev_window < 3 or self.stddev_window % 2 == 0:
            raise ValueError(
                f"stddev_window must be odd and >= 3, got {self.stddev_window}"
            )
        if self.interval <= 0:
            raise ValueError(f"interval must be positive, got {self.interval}")
        if self.speck_min_area < 0:
            raise ValueError(
                f"speck_min_area must be >= 0, got {self.speck_min_area}"
            )
        for key in self.frame_overrides:
            if not isinstance(key, int) or key < 0:
                raise ValueError(
                    f"frame_overrides keys must be frame indices >= 0, got {key!r}"
                )

    # ---- serialization ------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode,
            "flat_field": {
                "sigma_small": self.flat_field.sigma_small,
                "sigma_large": self.flat_field.sigma_large,
            },
            "g_neighbor": {
                "threshold_override": self.g_neighbor.threshold_override,
            },
            "kuwahara_window": self.kuwahara_window,
            "stddev_window": self.stddev_window,
            "bandpass": (
                None
                if self.bandpass is None
                else {"d1": self.bandpass.d1, "d2": self.bandpass.d2}
            ),
            "threshold": self.threshold,
            "morphology": {"steps": list(self.morphology.steps)},
            "interval": self.interval,
            "speck_min_area": self.speck_min_area,
            "frame_overrides": {
                str(i): {"d1": o.d1, "d2": o.d2, "threshold": o.threshold}
                for i, o in sorted(self.frame_overrides.items())
            },
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PipelineConfig":
        if not isinstance(data, dict):
            raise ValueError("config must be a JSON object")
        known = {
            "mode",
            "flat_field",
            "g_neighbor",
            "kuwahara_window",
            "stddev_window",
            "bandpass",
            "threshold",
            "morphology",
            "interval",
            "speck_min_area",
            "frame_overrides",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs: dict[str, Any] = {}
        if "mode" in data:
            kwargs["mode"] = data["mode"]
        if "flat_field" in data:
            kwargs["flat_field"] = FlatFieldParams(**data["flat_field"])
        if "g_neighbor" in data:
            kwargs["g_neighbor"] = GNeighborParams(**data["g_neighbor"])
        for key in ("kuwahara_window", "stddev_window", "threshold", "interval",
                    "speck_min_area"):
            if key in data:
                kwargs[key] = data[key]
        if "bandpass" in data and data["bandpass"] is not None:
            kwargs["bandpass"] = BandPassParams(**data["bandpass"])
        if "morphology" in data:
            kwargs["morphology"] = MorphologyPlan(
                steps=tuple(data["morphology"]["steps"])
            )
        if "frame_overrides" in data:
            kwargs["frame_overrides"] = {
                int(i): FrameOverride(**o)
                for i, o in data["frame_overrides"].items()
            }
        return cls(**kwargs)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_dict(data)

    # ---- per-frame resolution -----------------------------------------

    def override_for(self, frame_index: int) -> FrameOverride | None:
        return self.frame_overrides.get(frame_index)

    def with_override(self, frame_index: int, override: FrameOverride):
        merged = dict(self.frame_overrides)
        merged[frame_index] = override
        return PipelineConfig(
            mode=self.mode,
            flat_field=self.flat_field,
            g_neighbor=self.g_neighbor,
            kuwahara_window=self.kuwahara_window,
            stddev_window=self.stddev_window,
            bandpass=self.bandpass,
            threshold=self.threshold,
            morphology=self.morphology,
            interval=self.interval,
            speck_min_area=self.speck_min_area,
            frame_overrides=merged,
        )
