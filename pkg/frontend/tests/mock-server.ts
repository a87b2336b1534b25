/** Scripted in-memory stand-in for the annotation service.
 *
 * Implements the same revision contract as the real server (mutations carry
 * the revision they were based on; stale ones get 409) plus scripting hooks:
 * responses can be held back and released out of order, and single requests
 * can be forced to fail, so tests can provoke the races the client must
 * survive.
 */

import type { FetchLike } from "../src/api.js";
import type {
  LaneEnvelope, SessionEvent, SessionState, ViewData,
} from "../src/types.js";

export interface RecordedRequest {
  method: string;
  url: string;
  body: unknown;
}

function makeResponse(status: number, payload: unknown) {
  const text = typeof payload === "string"
    ? payload : JSON.stringify(payload);
  return {
    status,
    text: () => Promise.resolve(text),
    json: () => Promise.resolve(
      typeof payload === "string" ? JSON.parse(payload) : payload),
  };
}

function envelope(times: number[], values: number[]): LaneEnvelope {
  return { t: times, min: values, max: values };
}

export class MockServer {
  requests: RecordedRequest[] = [];
  private revision = 0;
  private motionOffsetS = 0;
  private startTimeS = 0;
  private events: SessionEvent[];
  private holdNext = false;
  private pendingGate: Promise<void> | null = null;
  private failNextWith: number | null = null;
  private readonly derivativeTimes: number[];
  private readonly derivativeValues: number[];

  constructor(readonly sessionId: string, events: SessionEvent[]) {
    this.events = events.map((e) => ({ ...e }));
    this.derivativeTimes = Array.from({ length: 50 }, (_, i) => i * 0.1);
    this.derivativeValues = this.derivativeTimes.map(
      (t) => Math.sin(2 * Math.PI * t));
  }

  /** The next response is withheld until the returned release fn is called;
   * its payload is still computed at request time, so a held view carries
   * the revision that was current when it was requested. */
  holdNextResponse(): () => void {
    let release: () => void = () => undefined;
    this.pendingGate = new Promise<void>((resolve) => { release = resolve; });
    this.holdNext = true;
    return release;
  }

  /** Answer the next mutating request with the given status. */
  failNext(status: number): void {
    this.failNextWith = status;
  }

  state(): SessionState {
    return {
      id: this.sessionId,
      format_version: 1,
      revision: this.revision,
      start_time_s: this.startTimeS,
      motion_offset_s: this.motionOffsetS,
      events: this.events.map((e) => ({ ...e })),
      unknown_direction_count: 0,
      has_motion: true,
    };
  }

  view(fromS: number, toS: number): ViewData {
    const keep = (t: number) => t >= fromS && t <= toS;
    const times = this.derivativeTimes
      .map((t) => t - this.motionOffsetS)
      .filter(keep);
    return {
      revision: this.revision,
      from_s: fromS,
      to_s: toS,
      waveform: envelope([fromS, toS], [0, 0]),
      odf: envelope([fromS, toS], [0, 0]),
      motion_derivative: envelope(times, this.derivativeValues
        .slice(0, times.length)),
      events: this.events.map(
        ({ time_s, direction, chord, source }) =>
          ({ time_s, direction, chord, source })),
    };
  }

  exportCsv(): string {
    const lines = ["time_s,direction,chord"];
    for (const e of this.events) {
      lines.push(`${e.time_s.toFixed(6)},${e.direction},${e.chord}`);
    }
    return lines.join("\n") + "\n";
  }

  /** Directions flip on recompute when the offset moves past 0.1 s; a cheap
   * stand-in for the real server's motion-based recomputation. */
  private recompute(): void {
    if (Math.abs(this.motionOffsetS) > 0.1) {
      this.events = this.events.map((e) => ({
        ...e,
        direction: e.direction === "down" ? "up" : "down",
      }));
    }
  }

  fetchFn: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const body = typeof init?.body === "string"
      ? JSON.parse(init.body) : null;
    this.requests.push({ method, url, body });

    const gate = this.holdNext ? this.pendingGate : null;
    this.holdNext = false;

    const respond = (status: number, payload: unknown) =>
      gate
        ? gate.then(() => makeResponse(status, payload))
        : Promise.resolve(makeResponse(status, payload));

    if (this.failNextWith !== null && method !== "GET") {
      const status = this.failNextWith;
      this.failNextWith = null;
      return respond(status, status === 409
        ? `stale revision, current is ${this.revision}`
        : "scripted failure");
    }

    const path = url.split("?")[0]!;
    if (path === "/health") return respond(200, { status: "ok" });

    if (path === `/sessions/${this.sessionId}/view`) {
      const params = new URLSearchParams(url.split("?")[1] ?? "");
      const view = this.view(Number(params.get("from_s") ?? 0),
                             Number(params.get("to_s") ?? 10));
      return respond(200, view);
    }
    if (path === `/sessions/${this.sessionId}/export`) {
      return respond(200, this.exportCsv());
    }
    if (path === `/sessions/${this.sessionId}` && method === "GET") {
      return respond(200, this.state());
    }
    if (path === `/sessions/${this.sessionId}` && method === "PATCH") {
      if (body.revision !== this.revision) {
        return respond(409, `stale revision ${body.revision}`);
      }
      if ("motion_offset_s" in body) {
        this.motionOffsetS = body.motion_offset_s;
      }
      if ("start_time_s" in body) this.startTimeS = body.start_time_s;
      this.recompute();
      this.revision += 1;
      return respond(200, this.state());
    }
    if (path === `/sessions/${this.sessionId}/events` && method === "POST") {
      if (body.revision !== this.revision) {
        return respond(409, `stale revision ${body.revision}`);
      }
      if (body.action === "insert") {
        this.events.push({
          time_s: body.time_s, direction: body.direction,
          chord: body.chord, source: "manual", grid_index: -1,
        });
        this.events.sort((a, b) => a.time_s - b.time_s);
      } else if (body.action === "delete") {
        this.events.splice(body.index, 1);
      } else if (body.action === "override") {
        const target = this.events[body.index];
        if (!target) return respond(422, "index out of range");
        if (body.direction) target.direction = body.direction;
        if (body.chord) target.chord = body.chord;
        if (body.time_s !== undefined) target.time_s = body.time_s;
        target.source = "manual";
      } else {
        return respond(422, `unknown action ${body.action}`);
      }
      this.revision += 1;
      return respond(200, this.state());
    }
    return respond(404, "unknown path");
  };
}

export function makeEvents(times: number[]): SessionEvent[] {
  return times.map((t, i) => ({
    time_s: t,
    direction: i % 2 === 0 ? "down" : "up",
    chord: "C:maj",
    source: "detected",
    grid_index: i,
  }));
}
