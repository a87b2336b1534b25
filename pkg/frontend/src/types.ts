/** Wire types for the annotation service HTTP contract. */

export type DirectionLabel = "down" | "up";
export type EventSourceLabel = "detected" | "interpolated" | "manual";

export interface SessionEvent {
  time_s: number;
  direction: DirectionLabel;
  chord: string;
  source: EventSourceLabel;
  grid_index: number;
}

export interface SessionState {
  id: string;
  format_version: number;
  revision: number;
  start_time_s: number;
  motion_offset_s: number;
  events: SessionEvent[];
  unknown_direction_count: number;
  has_motion: boolean;
}

export interface LaneEnvelope {
  t: number[];
  min: number[];
  max: number[];
}

export interface ViewEvent {
  time_s: number;
  direction: DirectionLabel;
  chord: string;
  source: EventSourceLabel;
}

export interface ViewData {
  revision: number;
  from_s: number;
  to_s: number;
  waveform: LaneEnvelope;
  odf: LaneEnvelope;
  motion_derivative: LaneEnvelope | null;
  events: ViewEvent[];
}

export type EventEdit =
  | { action: "override"; index: number; time_s?: number;
      direction?: DirectionLabel; chord?: string }
  | { action: "insert"; time_s: number; direction: DirectionLabel;
      chord: string }
  | { action: "delete"; index: number };

export interface SessionPatch {
  start_time_s?: number;
  motion_offset_s?: number;
}
