/** View-model for the tuning panel, free of any DOM so it can be
 * exercised headlessly.
 *
 * Responsibilities: clamp slider values to legal combinations
 * (d1 > d2 >= 0, threshold within its band), debounce preview requests,
 * drop out-of-order responses by sequence number, remember accepted and
 * last-used triplets per frame so revisiting a frame restores its
 * sliders, and guard accept behind a fresh preview.
 */

import type { FrameInfo, Measurement, PreviewPayload, Triplet, TunerApi } from "./api.js";
import { ServiceError } from "./api.js";
import { debounce, type Debounced } from "./debounce.js";

export interface SliderRange {
  min: number;
  max: number;
}

export interface SliderLimits {
  d1: SliderRange;
  d2: SliderRange;
  threshold: SliderRange;
  /** Smallest allowed d1 - d2 separation when one slider crowds the other. */
  minGap: number;
}

/** Bounds bracket the working values seen in practice (d1 up to a few
 * hundred spectrum pixels, thresholds a few hundredths). */
export const DEFAULT_LIMITS: SliderLimits = {
  d1: { min: 0.5, max: 300 },
  d2: { min: 0, max: 60 },
  threshold: { min: 0, max: 0.1 },
  minGap: 0.01,
};

export const DEFAULT_TRIPLET: Triplet = { d1: 40, d2: 1, threshold: 0.05 };

export interface TunerState {
  frames: FrameInfo[];
  currentFrame: number;
  params: Triplet;
  /** Latest preview applied to the view, with the params it answers. */
  preview: PreviewPayload | null;
  previewParams: Triplet | null;
  pending: boolean;
  error: string | null;
  errorFields: string[];
}

export interface TunerOptions {
  api: TunerApi;
  onRender: (state: Readonly<TunerState>) => void;
  debounceMs?: number;
  limits?: SliderLimits;
  defaults?: Triplet;
}

export type SliderField = keyof Triplet;

const clamp = (value: number, lo: number, hi: number): number =>
  Math.min(hi, Math.max(lo, value));

const sameTriplet = (a: Triplet | null, b: Triplet | null): boolean =>
  a !== null &&
  b !== null &&
  a.d1 === b.d1 &&
  a.d2 === b.d2 &&
  a.threshold === b.threshold;

export class TunerController {
  readonly limits: SliderLimits;

  private readonly api: TunerApi;
  private readonly onRender: (state: Readonly<TunerState>) => void;
  private readonly defaults: Triplet;
  private readonly requestPreview: Debounced<[]>;

  private frames: FrameInfo[] = [];
  private currentFrame = 0;
  private params: Triplet;
  private preview: PreviewPayload | null = null;
  private previewParams: Triplet | null = null;
  private error: string | null = null;
  private errorFields: string[] = [];

  /** Last triplet POSTed to accept, per frame (slider restore source). */
  private accepted = new Map<number, Triplet>();
  /** Last slider position per frame, accepted or not. */
  private visited = new Map<number, Triplet>();

  private nextSeq = 0;
  private appliedSeq = 0;
  private inFlight = 0;

  constructor(options: TunerOptions) {
    this.api = options.api;
    this.onRender = options.onRender;
    this.limits = options.limits ?? DEFAULT_LIMITS;
    this.defaults = options.defaults ?? DEFAULT_TRIPLET;
    this.params = { ...this.defaults };
    this.requestPreview = debounce(
      () => void this.firePreview(),
      options.debounceMs ?? 150,
    );
  }

  // ---- lifecycle ---------------------------------------------------------

  async start(): Promise<void> {
    this.frames = await this.api.listFrames();
    if (this.frames.length > 0) {
      this.selectFrame(this.frames[0].frame_index);
    } else {
      this.render();
    }
  }

  // ---- reads -------------------------------------------------------------

  state(): Readonly<TunerState> {
    return {
      frames: this.frames.map((f) => ({ ...f })),
      currentFrame: this.currentFrame,
      params: { ...this.params },
      preview: this.preview,
      previewParams: this.previewParams ? { ...this.previewParams } : null,
      pending: this.inFlight > 0,
      error: this.error,
      errorFields: [...this.errorFields],
    };
  }

  /** Accept only makes sense when the preview on screen answers the
   * sliders as they stand now. */
  canAccept(): boolean {
    return (
      this.preview !== null &&
      this.inFlight === 0 &&
      sameTriplet(this.previewParams, this.params)
    );
  }

  // ---- slider interaction --------------------------------------------------

  /** Clamp into range and against the other cutoff; returns the value
   * actually adopted.  A drag that collides with the other cutoff (d2
   * pushed above d1 or d1 below d2) clamps the knob but sends nothing;
   * requests only go out for values the service would accept. */
  setSlider(field: SliderField, value: number): number {
    const lim = this.limits;
    let adopted: number;
    let collided = false;
    if (field === "d1") {
      adopted = clamp(value, lim.d1.min, lim.d1.max);
      const floor = this.params.d2 + lim.minGap;
      if (adopted < floor) {
        adopted = Math.min(floor, lim.d1.max);
        collided = true;
      }
    } else if (field === "d2") {
      adopted = clamp(value, lim.d2.min, lim.d2.max);
      const ceiling = this.params.d1 - lim.minGap;
      if (adopted > ceiling) {
        adopted = Math.max(ceiling, lim.d2.min);
        collided = true;
      }
    } else {
      adopted = clamp(value, lim.threshold.min, lim.threshold.max);
    }
    if (this.params[field] === adopted) {
      this.render(); // snap a dragged-out-of-range knob back
      return adopted;
    }
    this.params = { ...this.params, [field]: adopted };
    this.visited.set(this.currentFrame, { ...this.params });
    if (!collided) this.requestPreview();
    this.render();
    return adopted;
  }

  // ---- frame switching -----------------------------------------------------

  selectFrame(frameIndex: number): void {
    this.requestPreview.cancel();
    this.currentFrame = frameIndex;
    const restored =
      this.accepted.get(frameIndex) ?? this.visited.get(frameIndex);
    this.params = restored ? { ...restored } : { ...this.defaults };
    this.visited.set(frameIndex, { ...this.params });
    this.preview = null;
    this.previewParams = null;
    this.error = null;
    this.errorFields = [];
    this.requestPreview();
    this.render();
  }

  // ---- requests ------------------------------------------------------------

  private async firePreview(): Promise<void> {
    const seq = ++this.nextSeq;
    const frame = this.currentFrame;
    const params = { ...this.params };
    this.inFlight += 1;
    this.render();
    try {
      const payload = await this.api.preview(frame, params);
      if (seq > this.appliedSeq && frame === this.currentFrame) {
        this.appliedSeq = seq;
        this.preview = payload;
        this.previewParams = params;
        this.error = null;
        this.errorFields = [];
      }
    } catch (err) {
      if (seq > this.appliedSeq && frame === this.currentFrame) {
        this.appliedSeq = seq; // a newer answer exists; older ones stay dead
        if (err instanceof ServiceError) {
          this.error = err.message;
          this.errorFields = err.fields;
        } else {
          this.error = err instanceof Error ? err.message : String(err);
          this.errorFields = [];
        }
        // previous preview intentionally retained
      }
    } finally {
      this.inFlight -= 1;
      this.render();
    }
  }

  async acceptCurrent(): Promise<boolean> {
    if (!this.canAccept()) return false;
    const frame = this.currentFrame;
    const params = { ...this.params };
    try {
      await this.api.accept(frame, params);
    } catch (err) {
      this.error =
        err instanceof Error ? `accept failed: ${err.message}` : String(err);
      this.errorFields = err instanceof ServiceError ? err.fields : [];
      this.render();
      return false;
    }
    this.accepted.set(frame, params);
    this.frames = this.frames.map((f) =>
      f.frame_index === frame ? { ...f, has_override: true } : f,
    );
    this.error = null;
    this.errorFields = [];
    this.render();
    return true;
  }

  private render(): void {
    this.onRender(this.state());
  }
}

/** Readout line for the numbers pane; circularity to three decimals. */
export function formatMeasurement(m: Measurement): string {
  if (!m.detected) return "no object detected";
  return (
    `area ${m.area_px} px · perimeter ${m.perimeter_px.toFixed(1)} px` +
    ` · circularity ${m.circularity.toFixed(3)}`
  );
}
