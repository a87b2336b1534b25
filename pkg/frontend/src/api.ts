/** Thin typed client for the annotation service.
 *
 * Every mutating call carries the revision it was based on; the server
 * answers 409 when that revision is stale. The fetch implementation is
 * injected so tests can script the server.
 */

import type {
  EventEdit, SessionPatch, SessionState, ViewData,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: {
    method?: string;
    headers?: Record<string, string>;
    body?: string | FormData;
  },
) => Promise<{
  status: number;
  text(): Promise<string>;
  json(): Promise<unknown>;
}>;

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class StaleRevisionError extends ApiError {
  constructor(message: string) {
    super(409, message);
  }
}

async function raiseFor(status: number, response: { text(): Promise<string> }):
    Promise<never> {
  const body = await response.text();
  if (status === 409) throw new StaleRevisionError(body);
  throw new ApiError(status, body);
}

export interface CreateSessionInput {
  audio: Blob;
  plan: object;
  motion?: Blob;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike,
  ) {}

  async health(): Promise<void> {
    const res = await this.fetchFn(`${this.baseUrl}/health`);
    if (res.status !== 200) await raiseFor(res.status, res);
  }

  async createSession(input: CreateSessionInput): Promise<SessionState> {
    const form = new FormData();
    form.append("audio", input.audio, "audio.wav");
    form.append("plan", JSON.stringify(input.plan));
    if (input.motion) form.append("motion", input.motion, "motion.csv");
    const res = await this.fetchFn(`${this.baseUrl}/sessions`, {
      method: "POST",
      body: form,
    });
    if (res.status !== 200) await raiseFor(res.status, res);
    return (await res.json()) as SessionState;
  }

  async getSession(id: string): Promise<SessionState> {
    const res = await this.fetchFn(`${this.baseUrl}/sessions/${id}`);
    if (res.status !== 200) await raiseFor(res.status, res);
    return (await res.json()) as SessionState;
  }

  async getView(
    id: string, fromS: number, toS: number, points: number,
  ): Promise<ViewData> {
    const query = `from_s=${fromS}&to_s=${toS}&points=${points}`;
    const res = await this.fetchFn(
      `${this.baseUrl}/sessions/${id}/view?${query}`);
    if (res.status !== 200) await raiseFor(res.status, res);
    return (await res.json()) as ViewData;
  }

  async patchSession(
    id: string, revision: number, patch: SessionPatch,
  ): Promise<SessionState> {
    const res = await this.fetchFn(`${this.baseUrl}/sessions/${id}`, {
      method: "PATCH",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ revision, ...patch }),
    });
    if (res.status !== 200) await raiseFor(res.status, res);
    return (await res.json()) as SessionState;
  }

  async postEvent(
    id: string, revision: number, edit: EventEdit,
  ): Promise<SessionState> {
    const res = await this.fetchFn(`${this.baseUrl}/sessions/${id}/events`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ revision, ...edit }),
    });
    if (res.status !== 200) await raiseFor(res.status, res);
    return (await res.json()) as SessionState;
  }

  async getExport(id: string): Promise<string> {
    const res = await this.fetchFn(`${this.baseUrl}/sessions/${id}/export`);
    if (res.status !== 200) await raiseFor(res.status, res);
    return res.text();
  }
}
