/** Typed client for the tuning service JSON API. */

export interface Triplet {
  d1: number;
  d2: number;
  threshold: number;
}

export interface FrameInfo {
  frame_index: number;
  timestamp: number;
  has_override: boolean;
}

export interface Measurement {
  frame_index: number;
  timestamp_min: number;
  area_px: number;
  perimeter_px: number;
  circularity: number;
  detected: boolean;
}

export interface PreviewPayload {
  /** base64 PNGs, ready for a data: URI */
  filtered: string;
  mask: string;
  overlay: string;
  measurement: Measurement;
}

export interface ServiceErrorBody {
  error: string;
  fields: string[];
}

/** Validation or not-found failure reported by the service. */
export class ServiceError extends Error {
  readonly fields: string[];
  readonly status: number;

  constructor(status: number, body: ServiceErrorBody) {
    super(body.error);
    this.name = "ServiceError";
    this.status = status;
    this.fields = body.fields ?? [];
  }
}

/** What the controller needs from the service; swap for a fake in tests. */
export interface TunerApi {
  listFrames(): Promise<FrameInfo[]>;
  preview(frameIndex: number, params: Triplet): Promise<PreviewPayload>;
  accept(frameIndex: number, params: Triplet): Promise<void>;
}

async function parseFailure(resp: Response): Promise<never> {
  let body: ServiceErrorBody = { error: `HTTP ${resp.status}`, fields: [] };
  try {
    body = (await resp.json()) as ServiceErrorBody;
  } catch {
    /* non-JSON failure: keep the status-line message */
  }
  throw new ServiceError(resp.status, body);
}

export function createApi(base = ""): TunerApi {
  return {
    async listFrames(): Promise<FrameInfo[]> {
      const resp = await fetch(`${base}/api/frames`);
      if (!resp.ok) await parseFailure(resp);
      return (await resp.json()) as FrameInfo[];
    },

    async preview(frameIndex: number, params: Triplet): Promise<PreviewPayload> {
      const resp = await fetch(`${base}/api/frames/${frameIndex}/preview`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(params),
      });
      if (!resp.ok) await parseFailure(resp);
      return (await resp.json()) as PreviewPayload;
    },

    async accept(frameIndex: number, params: Triplet): Promise<void> {
      const resp = await fetch(`${base}/api/frames/${frameIndex}/accept`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(params),
      });
      if (!resp.ok) await parseFailure(resp);
    },
  };
}

export function originalFrameUrl(frameIndex: number, base = ""): string {
  return `${base}/api/frames/${frameIndex}/original`;
}

export function overridesUrl(base = ""): string {
  return `${base}/api/overrides`;
}
