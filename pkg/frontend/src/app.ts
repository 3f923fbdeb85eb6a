/**
 * Application wiring: binds the viewport, timeline, sparklines, and keyboard
 * table to the annotation service. Navigation renders optimistically from
 * the server's jump responses; annotation state always re-renders from
 * server responses, never from locally computed geometry.
 */

import { ApiClient, ApiError, FrameState, SessionState, StyleDoc } from "./api.js";
import { decodeKey, KeyboardAction } from "./keyboard.js";
import { Sparklines } from "./sparklines.js";
import { Timeline } from "./timeline.js";
import { Viewport, ViewportClick } from "./viewport.js";

const PREFETCH_RADIUS = 10;

export interface AppOptions {
  viewportWidth?: number;
  viewportHeight?: number;
  stripWidth?: number;
}

export class App {
  readonly api: ApiClient;
  readonly viewport: Viewport;
  readonly timeline: Timeline | null = null;
  readonly sparklines: Sparklines | null = null;
  readonly toast: HTMLElement;
  style: StyleDoc;
  currentFrame = 0;
  frameCount = 1;
  private prefetched = new Set<number>();

  private constructor(
    root: HTMLElement,
    api: ApiClient,
    session: SessionState,
    options: AppOptions,
  ) {
    this.api = api;
    this.style = session.style;
    this.currentFrame = session.current_frame;
    this.frameCount = session.frame_count;

    const width = options.viewportWidth ?? 512;
    const height = options.viewportHeight ?? 512;
    const stripWidth = options.stripWidth ?? width;

    const viewportHost = document.createElement("div");
    root.append(viewportHost);
    this.viewport = new Viewport(viewportHost, width, height);

    if (this.style.timeline) {
      const timelineHost = document.createElement("div");
      root.append(timelineHost);
      this.timeline = new Timeline(timelineHost, stripWidth);
      this.timeline.onSeek((frame) => {
        void this.run(() => this.api.jump("seek", { frame }).then(() => this.showFrame(frame)));
      });
    }
    if (this.style.sparklines) {
      const sparklineHost = document.createElement("div");
      root.append(sparklineHost);
      this.sparklines = new Sparklines(sparklineHost, stripWidth);
    }

    this.toast = document.createElement("div");
    this.toast.className = "toast";
    this.toast.style.display = "none";
    root.append(this.toast);

    this.viewport.onClick((click) => void this.handleViewportClick(click));
  }

  static async create(root: HTMLElement, api: ApiClient, options: AppOptions = {}): Promise<App> {
    const session = await api.getSession();
    const app = new App(root, api, session, options);
    await app.showFrame(session.current_frame);
    try {
      api.connectEvents(() => void app.refreshStrips());
    } catch {
      // No WebSocket support: state still refreshes after every action.
    }
    return app;
  }

  /** Run a server call; server errors surface as a toast, never corrupt state. */
  private async run(call: () => Promise<unknown>): Promise<void> {
    try {
      await call();
    } catch (error) {
      if (error instanceof ApiError && error.featureDisabled) return; // inert
      this.showToast(error instanceof Error ? error.message : String(error));
    }
  }

  private showToast(message: string): void {
    this.toast.textContent = message;
    this.toast.style.display = "block";
  }

  async showFrame(frame: number): Promise<void> {
    const state = await this.api.getFrame(frame);
    this.currentFrame = state.frame;
    this.frameCount = state.frame_count;
    this.renderFrame(state);
    await this.refreshStrips();
    this.prefetchAround(frame);
  }

  private renderFrame(state: FrameState): void {
    const imageUrl = state.image_url ? this.api.frameImageUrl(state.frame) : null;
    this.viewport.render(state, this.style, imageUrl);
  }

  async refreshStrips(): Promise<void> {
    if (this.timeline) {
      const timelineState = await this.api.getTimeline();
      this.timeline.render(timelineState);
    }
    if (this.sparklines) {
      const sparklineState = await this.api.getSparklines();
      this.sparklines.render(sparklineState);
    }
  }

  private prefetchAround(frame: number): void {
    if (typeof Image === "undefined") return;
    for (let f = frame - PREFETCH_RADIUS; f <= frame + PREFETCH_RADIUS; f += 1) {
      if (f < 0 || f >= this.frameCount || this.prefetched.has(f)) continue;
      this.prefetched.add(f);
      new Image().src = this.api.frameImageUrl(f);
    }
  }

  private async handleViewportClick(click: ViewportClick): Promise<void> {
    if (click.button === 1) {
      await this.run(async () => {
        const state = await this.api.clear(this.currentFrame);
        this.renderFrame(state);
        await this.refreshStrips();
      });
    } else if (click.button === 0) {
      await this.run(async () => {
        const state = await this.api.click(this.currentFrame, click.x, click.y);
        this.renderFrame(state);
        await this.refreshStrips();
      });
    }
  }

  /** Keyboard entry point; returns the decoded action (null = inert key). */
  async handleKey(stroke: { key: string; shiftKey?: boolean; ctrlKey?: boolean }): Promise<KeyboardAction | null> {
    const action = decodeKey(stroke, this.style);
    if (action === null) return null;
    await this.run(async () => {
      switch (action.kind) {
        case "step": {
          const result = await this.api.jump("step", { delta: action.delta });
          await this.showFrame(result.frame);
          break;
        }
        case "prev_annotated":
        case "next_annotated": {
          const result = await this.api.jump(action.kind);
          await this.showFrame(result.frame);
          break;
        }
        case "jump": {
          const result = await this.api.jump(action.smart ? "smart" : "random");
          await this.showFrame(result.frame);
          break;
        }
        case "refresh": {
          await this.api.refresh();
          await this.showFrame(this.currentFrame);
          break;
        }
      }
    });
    return action;
  }

  bindKeyboard(target: EventTarget): void {
    target.addEventListener("keydown", (event) => {
      const key = event as KeyboardEvent;
      void this.handleKey({ key: key.key, shiftKey: key.shiftKey, ctrlKey: key.ctrlKey });
    });
  }
}
