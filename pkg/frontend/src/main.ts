/** DOM wiring for the tuning panel: sliders feed the controller, the
 * controller's render callback repaints the panes and readouts. */

import { createApi, originalFrameUrl, overridesUrl } from "./api.js";
import {
  DEFAULT_LIMITS,
  formatMeasurement,
  TunerController,
  type SliderField,
  type TunerState,
} from "./controller.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const sliderIds: Record<SliderField, { range: string; number: string }> = {
  d1: { range: "d1-range", number: "d1-number" },
  d2: { range: "d2-range", number: "d2-number" },
  threshold: { range: "threshold-range", number: "threshold-number" },
};

function setPane(img: HTMLImageElement, b64: string | null): void {
  if (b64 === null) {
    img.removeAttribute("src");
    img.classList.add("empty");
    return;
  }
  img.classList.remove("empty");
  img.src = `data:image/png;base64,${b64}`;
}

function main(): void {
  const api = createApi();
  const frameList = $<HTMLUListElement>("frame-list");
  const panes = {
    original: $<HTMLImageElement>("pane-original"),
    filtered: $<HTMLImageElement>("pane-filtered"),
    mask: $<HTMLImageElement>("pane-mask"),
    overlay: $<HTMLImageElement>("pane-overlay"),
  };
  const readout = $<HTMLParagraphElement>("measurement");
  const errorBanner = $<HTMLDivElement>("error-banner");
  const acceptButton = $<HTMLButtonElement>("accept");
  const pendingDot = $<HTMLSpanElement>("pending");
  $<HTMLAnchorElement>("export").href = overridesUrl();

  // A broken payload should not leave a half-rendered pane behind.
  for (const img of Object.values(panes)) {
    img.addEventListener("error", () => {
      img.classList.add("empty");
      img.removeAttribute("src");
    });
  }

  const controller = new TunerController({
    api,
    onRender: render,
  });

  let shownOriginal: number | null = null;

  function render(state: Readonly<TunerState>): void {
    for (const field of Object.keys(sliderIds) as SliderField[]) {
      const ids = sliderIds[field];
      const value = String(state.params[field]);
      $<HTMLInputElement>(ids.range).value = value;
      $<HTMLInputElement>(ids.number).value = value;
    }

    frameList.replaceChildren(
      ...state.frames.map((frame) => {
        const li = document.createElement("li");
        const button = document.createElement("button");
        button.type = "button";
        button.textContent = `frame ${frame.frame_index} · ${frame.timestamp.toFixed(1)} min`;
        button.classList.toggle("current", frame.frame_index === state.currentFrame);
        button.addEventListener("click", () => controller.selectFrame(frame.frame_index));
        li.appendChild(button);
        if (frame.has_override) {
          const badge = document.createElement("span");
          badge.className = "badge";
          badge.textContent = "override";
          li.appendChild(badge);
        }
        return li;
      }),
    );

    if (state.frames.length > 0 && shownOriginal !== state.currentFrame) {
      shownOriginal = state.currentFrame;
      panes.original.classList.remove("empty");
      panes.original.src = originalFrameUrl(state.currentFrame);
    }
    setPane(panes.filtered, state.preview?.filtered ?? null);
    setPane(panes.mask, state.preview?.mask ?? null);
    setPane(panes.overlay, state.preview?.overlay ?? null);

    readout.textContent = state.preview
      ? formatMeasurement(state.preview.measurement)
      : "—";
    pendingDot.classList.toggle("active", state.pending);
    acceptButton.disabled = !controller.canAccept();

    errorBanner.textContent = state.error ?? "";
    errorBanner.classList.toggle("visible", state.error !== null);
  }

  for (const field of Object.keys(sliderIds) as SliderField[]) {
    const ids = sliderIds[field];
    const range = $<HTMLInputElement>(ids.range);
    const number = $<HTMLInputElement>(ids.number);
    const lim = DEFAULT_LIMITS[field];
    for (const input of [range, number]) {
      input.min = String(lim.min);
      input.max = String(lim.max);
      input.step = "any";
    }
    range.addEventListener("input", () => {
      controller.setSlider(field, Number(range.value));
    });
    number.addEventListener("change", () => {
      const parsed = Number(number.value);
      if (Number.isFinite(parsed)) controller.setSlider(field, parsed);
    });
  }

  acceptButton.addEventListener("click", () => void controller.acceptCurrent());

  // Cut-off headroom is image-size dependent, so the caps stay editable.
  const boundInputs: Array<[SliderField, string]> = [
    ["d1", "d1-max"],
    ["d2", "d2-max"],
  ];
  for (const [field, id] of boundInputs) {
    const input = $<HTMLInputElement>(id);
    input.value = String(controller.limits[field].max);
    input.addEventListener("change", () => {
      const parsed = Number(input.value);
      if (!Number.isFinite(parsed) || parsed <= controller.limits[field].min) {
        input.value = String(controller.limits[field].max);
        return;
      }
      controller.limits[field].max = parsed;
      const ids = sliderIds[field];
      $<HTMLInputElement>(ids.range).max = String(parsed);
      $<HTMLInputElement>(ids.number).max = String(parsed);
      controller.setSlider(field, controller.state().params[field]);
    });
  }

  void controller.start().catch((err) => {
    errorBanner.textContent =
      err instanceof Error ? err.message : "failed to load frames";
    errorBanner.classList.add("visible");
  });
}

main();
