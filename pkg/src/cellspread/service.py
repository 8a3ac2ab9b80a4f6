"""Local HTTP service for interactive per-frame tuning.

The expensive front of the chain (everything before the band-pass) is
computed once per frame and cached; each preview then only pays for the
band-pass, threshold, morphology and measurement, which is what makes
slider-driven live tuning feel instant.  Accepted (d1, d2, threshold)
triplets are kept per frame and exported as a config fragment that
`single` runs consume.

(No postponed annotations here: the HTTP handlers' `Request` type must
be evaluated eagerly, while `fastapi` itself stays a local import.)
"""

import base64
import io
import threading
from dataclasses import dataclass
from numbers import Real
from pathlib import Path

import numpy as np
from PIL import Image

from .config import FrameOverride, PipelineConfig
from .filters import BandPassParams, fft_bandpass
from .image_io import FrameSequence, load_frame
from .measure import CellMeasurement, measure_frame, trace_contour
from .pipeline import preprocess_frame
from .segmentation import segment


class ValidationError(ValueError):
    """Bad tuning parameters; carries the offending field names."""

    def __init__(self, message: str, fields: list[str]):
        super().__init__(message)
        self.fields = list(fields)


class UnknownFrameError(LookupError):
    def __init__(self, frame_index):
        super().__init__(f"no frame with index {frame_index!r}")
        self.frame_index = frame_index


def _validate_triplet(d1, d2, threshold) -> tuple[float, float, float]:
    bad_types = [
        name
        for name, value in (("d1", d1), ("d2", d2), ("threshold", threshold))
        if not isinstance(value, Real) or isinstance(value, bool)
    ]
    if bad_types:
        raise ValidationError(
            f"parameters must be numbers: {', '.join(bad_types)}", bad_types
        )
    d1, d2, threshold = float(d1), float(d2), float(threshold)
    fields = []
    if not d1 > d2 >= 0:
        fields += ["d1", "d2"]
    if not 0.0 <= threshold <= 1.0:
        fields.append("threshold")
    if fields:
        raise ValidationError(
            f"need d1 > d2 >= 0 and threshold in [0, 1]; "
            f"got d1={d1}, d2={d2}, threshold={threshold}",
            fields,
        )
    return d1, d2, threshold


@dataclass(frozen=True)
class PreviewResult:
    filtered: np.ndarray  # [0, 1] band-passed ridge image
    mask: np.ndarray
    overlay: np.ndarray  # uint8 RGB, contour drawn on the original
    measurement: CellMeasurement


class TuneSession:
    """State of one tuning run: a frame sequence, the base settings,
    accepted overrides, and the pre-band-pass cache.

    Previews are pure reads; `accept` is the only mutation, guarded by
    a lock so concurrent requests serialize on the override table.
    """

    def __init__(
        self,
        sequence: FrameSequence,
        base_config: PipelineConfig,
        cache_enabled: bool = True,
    ):
        if len(sequence) == 0:
            raise ValueError("tuning session needs at least one frame")
        if sequence.interval != base_config.interval:
            raise ValueError(
                f"sequence interval {sequence.interval} != config interval "
                f"{base_config.interval}; load the sequence with the config's interval"
            )
        self.sequence = sequence
        self.base_config = base_config
        self.cache_enabled = cache_enabled
        self._accepted: dict[int, FrameOverride] = {}
        self._cache: dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    # ---- frame access --------------------------------------------------

    def _ref(self, frame_index: int):
        if not isinstance(frame_index, int) or not 0 <= frame_index < len(
            self.sequence
        ):
            raise UnknownFrameError(frame_index)
        return self.sequence[frame_index]

    def original(self, frame_index: int) -> np.ndarray:
        return load_frame(self._ref(frame_index).path)

    def intermediate(self, frame_index: int) -> np.ndarray:
        """Everything before the band-pass, cached per frame.

        The cached array depends only on (frame, base_config), so a
        cache hit can never change a preview versus recomputing.
        """
        self._ref(frame_index)
        if self.cache_enabled:
            with self._lock:
                hit = self._cache.get(frame_index)
            if hit is not None:
                return hit
        ridge = preprocess_frame(self.original(frame_index), self.base_config)
        ridge.setflags(write=False)
        if self.cache_enabled:
            with self._lock:
                self._cache[frame_index] = ridge
        return ridge

    # ---- operations ----------------------------------------------------

    def list_frames(self) -> list[dict]:
        with self._lock:
            accepted = set(self._accepted)
        return [
            {
                "frame_index": ref.index,
                "timestamp": ref.timestamp,
                "has_override": ref.index in accepted,
            }
            for ref in self.sequence
        ]

    def preview(self, frame_index: int, d1, d2, threshold) -> PreviewResult:
        ref = self._ref(frame_index)
        d1, d2, threshold = _validate_triplet(d1, d2, threshold)
        filtered = fft_bandpass(
            self.intermediate(frame_index), BandPassParams(d1, d2)
        )
        result = segment(
            filtered,
            threshold,
            self.base_config.morphology,
            self.base_config.speck_min_area,
        )
        measurement = measure_frame(result, ref.index, ref.timestamp)
        overlay = _draw_overlay(self.original(frame_index), result.mask)
        return PreviewResult(
            filtered=filtered,
            mask=result.mask,
            overlay=overlay,
            measurement=measurement,
        )

    def accept(self, frame_index: int, d1, d2, threshold) -> None:
        self._ref(frame_index)
        d1, d2, threshold = _validate_triplet(d1, d2, threshold)
        override = FrameOverride(d1=d1, d2=d2, threshold=threshold)
        with self._lock:
            self._accepted[frame_index] = override  # last write wins

    def export_overrides(self) -> dict:
        """Config fragment: merge into a PipelineConfig JSON to replay
        accepted frames through `single` runs."""
        with self._lock:
            accepted = dict(self._accepted)
        return {
            "frame_overrides": {
                str(i): {"d1": o.d1, "d2": o.d2, "threshold": o.threshold}
                for i, o in sorted(accepted.items())
            }
        }


# ---- payload helpers ----------------------------------------------------


def _to_uint8(img: np.ndarray) -> np.ndarray:
    return np.round(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)


def _draw_overlay(original: np.ndarray, mask: np.ndarray) -> np.ndarray:
    rgb = np.repeat(_to_uint8(original)[:, :, None], 3, axis=2)
    if mask.any():
        for r, c in trace_contour(mask):
            rgb[r, c] = (255, 40, 40)
    return rgb


def _png_b64(array: np.ndarray) -> str:
    if array.dtype == bool:
        pil = Image.fromarray(array.astype(np.uint8) * 255)
    elif array.ndim == 3:
        pil = Image.fromarray(array)
    else:
        pil = Image.fromarray(_to_uint8(array))
    buf = io.BytesIO()
    pil.save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def _png_bytes(array: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(_to_uint8(array)).save(buf, format="PNG")
    return buf.getvalue()


def measurement_json(m: CellMeasurement) -> dict:
    return {
        "frame_index": m.frame_index,
        "timestamp_min": m.timestamp,
        "area_px": m.area,
        "perimeter_px": m.perimeter,
        "circularity": m.circularity,
        "detected": m.detected,
    }


# ---- HTTP layer ----------------------------------------------------------


def create_app(session: TuneSession, ui_dir: str | Path | None = None):
    """FastAPI app over a TuneSession; serves the tuning UI bundle at /
    when `ui_dir` points at one."""
    from fastapi import FastAPI, Request
    from fastapi.responses import HTMLResponse, JSONResponse, Response
    from fastapi.staticfiles import StaticFiles

    app = FastAPI(title="cellspread tuning service", docs_url=None, redoc_url=None)

    @app.exception_handler(ValidationError)
    async def _validation_handler(request, exc: ValidationError):
        return JSONResponse(
            status_code=422, content={"error": str(exc), "fields": exc.fields}
        )

    @app.exception_handler(UnknownFrameError)
    async def _unknown_frame_handler(request, exc: UnknownFrameError):
        return JSONResponse(
            status_code=404, content={"error": str(exc), "fields": ["frame_index"]}
        )

    def _frame_index(raw: str) -> int:
        try:
            return int(raw)
        except ValueError:
            raise UnknownFrameError(raw) from None

    async def _triplet_body(request: Request) -> tuple:
        try:
            body = await request.json()
        except Exception:
            raise ValidationError(
                "request body must be JSON with d1, d2, threshold",
                ["d1", "d2", "threshold"],
            ) from None
        if not isinstance(body, dict):
            raise ValidationError(
                "request body must be a JSON object", ["d1", "d2", "threshold"]
            )
        missing = [k for k in ("d1", "d2", "threshold") if k not in body]
        if missing:
            raise ValidationError(
                f"missing parameters: {', '.join(missing)}", missing
            )
        return body["d1"], body["d2"], body["threshold"]

    @app.get("/api/frames")
    async def frames():
        return session.list_frames()

    @app.get("/api/frames/{i}/original")
    async def original(i: str):
        img = session.original(_frame_index(i))
        return Response(content=_png_bytes(img), media_type="image/png")

    @app.post("/api/frames/{i}/preview")
    async def preview(i: str, request: Request):
        d1, d2, threshold = await _triplet_body(request)
        result = session.preview(_frame_index(i), d1, d2, threshold)
        return {
            "filtered": _png_b64(result.filtered),
            "mask": _png_b64(result.mask),
            "overlay": _png_b64(result.overlay),
            "measurement": measurement_json(result.measurement),
        }

    @app.post("/api/frames/{i}/accept")
    async def accept(i: str, request: Request):
        d1, d2, threshold = await _triplet_body(request)
        session.accept(_frame_index(i), d1, d2, threshold)
        return Response(status_code=204)

    @app.get("/api/overrides")
    async def overrides():
        return session.export_overrides()

    ui_path = Path(ui_dir) if ui_dir is not None else None
    if ui_path is not None and (ui_path / "index.html").is_file():
        app.mount("/", StaticFiles(directory=ui_path, html=True), name="ui")
    else:

        @app.get("/")
        async def placeholder():
            return HTMLResponse(
                "<html><body><h1>cellspread tuning service</h1>"
                "<p>No UI bundle found. Build the frontend and pass its "
                "dist directory via <code>serve --ui</code>; the JSON API "
                "lives under <code>/api/</code>.</p></body></html>"
            )

    return app


def serve(
    session: TuneSession,
    ui_dir: str | Path | None = None,
    host: str = "127.0.0.1",
    port: int = 8700,
) -> None:
    import uvicorn

    uvicorn.run(create_app(session, ui_dir), host=host, port=port)
