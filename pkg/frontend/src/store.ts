/** Client-side session state with optimistic concurrency.
 *
 * Invariants enforced here:
 *  - the rendered revision never goes backwards: responses carrying an older
 *    revision than the last acknowledged one are discarded;
 *  - at most one mutation is in flight at a time; later mutations queue;
 *  - a 409 (stale revision) reloads the authoritative state and notifies.
 */

import { ApiClient, StaleRevisionError } from "./api.js";
import type {
  EventEdit, SessionState, ViewData,
} from "./types.js";

export type Notice = { kind: "conflict" | "error"; message: string };

export interface StoreListener {
  onState(state: SessionState): void;
  onView(view: ViewData): void;
  onNotice(notice: Notice): void;
}

export class SessionStore {
  private state: SessionState | null = null;
  private view: ViewData | null = null;
  private mutation: Promise<void> = Promise.resolve();
  private viewPoints = 1000;

  constructor(
    private readonly api: ApiClient,
    private readonly listener: StoreListener,
  ) {}

  get revision(): number {
    return this.state ? this.state.revision : -1;
  }

  get currentState(): SessionState | null {
    return this.state;
  }

  get currentView(): ViewData | null {
    return this.view;
  }

  /** Adopt a server state snapshot unless it is older than what is shown. */
  private accept(state: SessionState): boolean {
    if (this.state && state.revision < this.state.revision) return false;
    this.state = state;
    this.listener.onState(state);
    return true;
  }

  async load(state: SessionState): Promise<void> {
    this.accept(state);
    await this.refreshView();
  }

  async refreshView(fromS?: number, toS?: number): Promise<void> {
    if (!this.state) throw new Error("no session loaded");
    const from = fromS ?? (this.view ? this.view.from_s : 0);
    const to = toS ?? (this.view ? this.view.to_s : this.lastEventTime() + 1);
    const view = await this.api.getView(
      this.state.id, from, to, this.viewPoints);
    // a view captured before the currently shown revision must not replace it
    if (view.revision < this.revision) return;
    this.view = view;
    this.listener.onView(view);
  }

  private lastEventTime(): number {
    const events = this.state ? this.state.events : [];
    return events.length ? events[events.length - 1]!.time_s : 9;
  }

  /** Serialize mutations; each one reads the revision at send time. */
  private enqueue(work: () => Promise<void>): Promise<void> {
    const next = this.mutation.then(work);
    // keep the chain alive after a failure
    this.mutation = next.catch(() => undefined);
    return next;
  }

  /** Commit an offset drag. A zero delta issues no request. */
  dragOffset(deltaS: number): Promise<void> {
    if (deltaS === 0) return Promise.resolve();
    return this.enqueue(async () => {
      if (!this.state) throw new Error("no session loaded");
      const target = this.state.motion_offset_s + deltaS;
      await this.mutate((revision) =>
        this.api.patchSession(this.state!.id, revision,
                              { motion_offset_s: target }));
    });
  }

  setStartTime(startS: number): Promise<void> {
    return this.enqueue(async () => {
      if (!this.state) throw new Error("no session loaded");
      await this.mutate((revision) =>
        this.api.patchSession(this.state!.id, revision,
                              { start_time_s: startS }));
    });
  }

  editEvent(edit: EventEdit): Promise<void> {
    return this.enqueue(async () => {
      if (!this.state) throw new Error("no session loaded");
      await this.mutate((revision) =>
        this.api.postEvent(this.state!.id, revision, edit));
    });
  }

  private async mutate(
    send: (revision: number) => Promise<SessionState>,
  ): Promise<void> {
    try {
      const state = await send(this.revision);
      this.accept(state);
      await this.refreshView();
    } catch (err) {
      if (err instanceof StaleRevisionError) {
        // someone else advanced the session: adopt the authoritative state
        const fresh = await this.api.getSession(this.state!.id);
        this.accept(fresh);
        await this.refreshView();
        this.listener.onNotice({
          kind: "conflict",
          message: "session changed elsewhere; state reloaded",
        });
        return;
      }
      this.listener.onNotice({
        kind: "error",
        message: err instanceof Error ? err.message : String(err),
      });
      throw err;
    }
  }

  exportCsv(): Promise<string> {
    if (!this.state) throw new Error("no session loaded");
    return this.api.getExport(this.state.id);
  }
}
