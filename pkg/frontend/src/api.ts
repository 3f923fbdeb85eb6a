/**
 * Typed client for the annotation service HTTP API.
 *
 * The server is the single source of truth: every point and box the UI
 * draws comes from these responses, never from client-side geometry on
 * persisted data.
 */

export interface PointDoc {
  x: number;
  y: number;
}

export interface BoxDoc {
  x_min: number;
  y_min: number;
  x_max: number;
  y_max: number;
}

export interface StyleDoc {
  name: string;
  timeline: boolean;
  autotrack: boolean;
  show_boxes_on_annotations: boolean;
  sparklines: boolean;
  smartjump: boolean;
  presentation: "random_order" | "timeline";
  click_mode: "point" | "xclick";
}

export interface AnnotationDoc {
  point: PointDoc;
  source: "click" | "xclick";
  box: BoxDoc | null;
}

export interface PredictionDoc {
  point: PointDoc;
  box: BoxDoc;
  provenance: "annotated" | "predicted";
  match_distance: number;
}

export interface FrameState {
  frame: number;
  frame_count: number;
  dirty_track: boolean;
  annotation: AnnotationDoc | null;
  pending_points: PointDoc[];
  predicted: PredictionDoc | null;
  image_url?: string;
}

export interface SessionState {
  style: StyleDoc;
  frame_count: number;
  current_frame: number;
  annotation_count: number;
  annotated_frames: number[];
  dirty_track: boolean;
  event_count: number;
}

export interface SparklineState {
  location_delta: number[];
  area_delta: number[];
  dirty_track: boolean;
}

export interface TimelineState {
  frame_count: number;
  current_frame: number;
  annotated_frames: number[];
}

export interface JumpResult {
  frame: number;
  moved: boolean;
}

export type JumpKind =
  | "step"
  | "seek"
  | "next_annotated"
  | "prev_annotated"
  | "random"
  | "smart";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }

  /** Feature-disabled responses make the triggering control inert. */
  get featureDisabled(): boolean {
    return this.status === 403;
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(readonly base: string) {}

  private url(path: string): string {
    return `${this.base}${path}`;
  }

  getSession(): Promise<SessionState> {
    return fetch(this.url("/session")).then((r) => asJson<SessionState>(r));
  }

  getFrame(frame: number): Promise<FrameState> {
    return fetch(this.url(`/frame/${frame}`)).then((r) => asJson<FrameState>(r));
  }

  frameImageUrl(frame: number): string {
    return this.url(`/frame/${frame}/image`);
  }

  click(frame: number, x: number, y: number): Promise<FrameState> {
    return fetch(this.url("/click"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ frame, x, y }),
    }).then((r) => asJson<FrameState>(r));
  }

  clear(frame: number): Promise<FrameState> {
    return fetch(this.url("/clear"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ frame }),
    }).then((r) => asJson<FrameState>(r));
  }

  refresh(): Promise<unknown> {
    return fetch(this.url("/refresh"), { method: "POST" }).then((r) => asJson(r));
  }

  jump(kind: JumpKind, opts: { delta?: number; frame?: number } = {}): Promise<JumpResult> {
    return fetch(this.url("/jump"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ kind, ...opts }),
    }).then((r) => asJson<JumpResult>(r));
  }

  getSparklines(): Promise<SparklineState> {
    return fetch(this.url("/sparklines")).then((r) => asJson<SparklineState>(r));
  }

  getTimeline(): Promise<TimelineState> {
    return fetch(this.url("/timeline")).then((r) => asJson<TimelineState>(r));
  }

  /** Push channel; fires the callback whenever a track refresh completes. */
  connectEvents(onRefreshComplete: () => void): WebSocket {
    const wsBase = this.base.replace(/^http/, "ws");
    const socket = new WebSocket(`${wsBase}/ws`);
    socket.onerror = () => {
      /* best-effort channel: state still refreshes after every action */
    };
    socket.onmessage = (event) => {
      try {
        const message = JSON.parse(String(event.data)) as { type?: string };
        if (message.type === "refresh_complete") onRefreshComplete();
      } catch {
        /* ignore malformed push messages */
      }
    };
    return socket;
  }
}
