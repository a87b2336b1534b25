/** DOM wiring: canvas rendering, drag handling, event editing, playback.
 *
 * All geometry and state logic lives in timeline.ts / store.ts; this file
 * only moves data between them and the document.
 */

import { ApiClient } from "./api.js";
import { SessionStore, type Notice } from "./store.js";
import {
  layoutLane, layoutMarkers, pixelToTime, shiftLane, zoomRange,
  type TimeRange,
} from "./timeline.js";
import type { SessionState, ViewData } from "./types.js";

const LANE_HEIGHT = 90;
const LANE_GAP = 10;
const LANE_NAMES = ["waveform", "odf", "motion_derivative"] as const;

class App {
  private readonly store: SessionStore;
  private range: TimeRange = { fromS: 0, toS: 10 };
  private dragStartX: number | null = null;
  private dragDeltaS = 0;
  private view: ViewData | null = null;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly audio: HTMLAudioElement,
    private readonly noticeBox: HTMLElement,
    api: ApiClient,
  ) {
    this.store = new SessionStore(api, {
      onState: (state) => this.onState(state),
      onView: (view) => {
        this.view = view;
        this.range = { fromS: view.from_s, toS: view.to_s };
        this.draw();
      },
      onNotice: (notice) => this.showNotice(notice),
    });
    canvas.addEventListener("pointerdown", (e) => this.pointerDown(e));
    canvas.addEventListener("pointermove", (e) => this.pointerMove(e));
    canvas.addEventListener("pointerup", () => this.pointerUp());
    canvas.addEventListener("dblclick", (e) => this.insertAt(e));
    canvas.addEventListener("wheel", (e) => {
      e.preventDefault();
      this.range = zoomRange(this.range, e.deltaY < 0 ? 2 : 0.5);
      void this.store.refreshView(this.range.fromS, this.range.toS);
    });
  }

  get session(): SessionStore {
    return this.store;
  }

  private onState(state: SessionState): void {
    const label = document.getElementById("revision");
    if (label) label.textContent = `rev ${state.revision}`;
  }

  private showNotice(notice: Notice): void {
    this.noticeBox.textContent = `${notice.kind}: ${notice.message}`;
  }

  private pointerDown(e: PointerEvent): void {
    // only the derivative lane (third) is draggable
    if (e.offsetY < 2 * (LANE_HEIGHT + LANE_GAP)) return;
    this.dragStartX = e.offsetX;
    this.dragDeltaS = 0;
  }

  private pointerMove(e: PointerEvent): void {
    if (this.dragStartX === null) return;
    const t0 = pixelToTime(this.dragStartX, this.range, this.canvas.width);
    const t1 = pixelToTime(e.offsetX, this.range, this.canvas.width);
    this.dragDeltaS = t1 - t0;
    this.draw();
  }

  private pointerUp(): void {
    if (this.dragStartX === null) return;
    const delta = this.dragDeltaS;
    this.dragStartX = null;
    this.dragDeltaS = 0;
    // displayed lane time falls as the offset grows, hence the sign flip
    void this.store.dragOffset(-delta);
  }

  private insertAt(e: MouseEvent): void {
    const timeS = pixelToTime(e.offsetX, this.range, this.canvas.width);
    const chord = (document.getElementById("chord") as HTMLInputElement)
      ?.value || "C:maj";
    const direction = (document.getElementById("direction") as
      HTMLSelectElement)?.value === "up" ? "up" as const : "down" as const;
    void this.store.editEvent({
      action: "insert", time_s: timeS, direction, chord,
    });
  }

  private draw(): void {
    if (!this.view) return;
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const width = this.canvas.width;
    ctx.clearRect(0, 0, width, this.canvas.height);

    LANE_NAMES.forEach((name, i) => {
      let lane = this.view![name];
      if (!lane) return;
      if (name === "motion_derivative" && this.dragDeltaS !== 0) {
        lane = shiftLane(lane, this.dragDeltaS);
      }
      const top = i * (LANE_HEIGHT + LANE_GAP);
      const { upper, lower } = layoutLane(lane, this.range, width,
                                          LANE_HEIGHT);
      ctx.beginPath();
      for (const [x, y] of upper) ctx.lineTo(x, top + y);
      for (let j = lower.length - 1; j >= 0; j--) {
        const [x, y] = lower[j]!;
        ctx.lineTo(x, top + y);
      }
      ctx.closePath();
      ctx.fillStyle = "#99999955";
      ctx.fill();
    });

    const markers = layoutMarkers(this.view.events, this.range, width);
    for (const m of markers) {
      ctx.strokeStyle = m.color;
      ctx.beginPath();
      ctx.moveTo(m.x, 0);
      ctx.lineTo(m.x, this.canvas.height);
      ctx.stroke();
      ctx.fillStyle = m.color;
      ctx.fillText(m.badge, m.x + 2, 10);
    }

    // playhead
    if (!this.audio.paused) {
      const x = (this.audio.currentTime - this.range.fromS)
        / (this.range.toS - this.range.fromS) * width;
      ctx.strokeStyle = "#222";
      ctx.beginPath();
      ctx.moveTo(x, 0);
      ctx.lineTo(x, this.canvas.height);
      ctx.stroke();
      requestAnimationFrame(() => this.draw());
    }
  }
}

export async function boot(): Promise<App> {
  const api = new ApiClient("", fetch.bind(globalThis));
  const canvas = document.getElementById("timeline") as HTMLCanvasElement;
  const audio = document.getElementById("player") as HTMLAudioElement;
  const notices = document.getElementById("notices") as HTMLElement;
  const app = new App(canvas, audio, notices, api);

  const form = document.getElementById("upload") as HTMLFormElement;
  form.addEventListener("submit", async (e) => {
    e.preventDefault();
    const audioFile = (document.getElementById("audio-file") as
      HTMLInputElement).files?.[0];
    const planText = (document.getElementById("plan-json") as
      HTMLTextAreaElement).value;
    const motionFile = (document.getElementById("motion-file") as
      HTMLInputElement).files?.[0];
    if (!audioFile) return;
    audio.src = URL.createObjectURL(audioFile);
    const state = await api.createSession({
      audio: audioFile,
      plan: JSON.parse(planText),
      motion: motionFile ?? undefined,
    });
    await app.session.load(state);
  });

  const exportButton = document.getElementById("export") as HTMLButtonElement;
  exportButton.addEventListener("click", async () => {
    const csv = await app.session.exportCsv();
    const url = URL.createObjectURL(new Blob([csv], { type: "text/csv" }));
    const a = document.createElement("a");
    a.href = url;
    a.download = "labels.csv";
    a.click();
  });

  return app;
}
