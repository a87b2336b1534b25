/** Pure timeline geometry: time <-> pixel mapping, lane polylines, and
 * event marker layout. No DOM access, so everything here is unit-testable.
 */

import type { LaneEnvelope, ViewEvent } from "./types.js";

export interface TimeRange {
  fromS: number;
  toS: number;
}

export interface Marker {
  x: number;
  timeS: number;
  direction: "down" | "up";
  chord: string;
  source: "detected" | "interpolated" | "manual";
  color: string;
  badge: string;
}

export const DIRECTION_COLORS = { down: "#d9534f", up: "#428bca" } as const;
export const SOURCE_BADGES = {
  detected: "D",
  interpolated: "I",
  manual: "M",
} as const;

export function timeToPixel(
  timeS: number, range: TimeRange, widthPx: number,
): number {
  const span = range.toS - range.fromS;
  if (span <= 0) throw new Error("range must have positive span");
  return ((timeS - range.fromS) / span) * widthPx;
}

export function pixelToTime(
  x: number, range: TimeRange, widthPx: number,
): number {
  if (widthPx <= 0) throw new Error("width must be positive");
  return range.fromS + (x / widthPx) * (range.toS - range.fromS);
}

export function layoutMarkers(
  events: ViewEvent[], range: TimeRange, widthPx: number,
): Marker[] {
  return events
    .filter((e) => e.time_s >= range.fromS && e.time_s <= range.toS)
    .map((e) => ({
      x: timeToPixel(e.time_s, range, widthPx),
      timeS: e.time_s,
      direction: e.direction,
      chord: e.chord,
      source: e.source,
      color: DIRECTION_COLORS[e.direction],
      badge: SOURCE_BADGES[e.source],
    }));
}

export interface LanePolyline {
  /** Upper and lower envelope as [x, y] pixel pairs, y in [0, heightPx]. */
  upper: Array<[number, number]>;
  lower: Array<[number, number]>;
}

/** Map an envelope lane into pixel space; value scaling is symmetric around
 * the lane's own extremes so the three lanes stay individually readable. */
export function layoutLane(
  lane: LaneEnvelope, range: TimeRange, widthPx: number, heightPx: number,
): LanePolyline {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of lane.min) lo = Math.min(lo, v);
  for (const v of lane.max) hi = Math.max(hi, v);
  const span = hi > lo ? hi - lo : 1;
  const toY = (v: number) => heightPx - ((v - lo) / span) * heightPx;
  const upper: Array<[number, number]> = [];
  const lower: Array<[number, number]> = [];
  for (let i = 0; i < lane.t.length; i++) {
    const t = lane.t[i]!;
    if (t < range.fromS || t > range.toS) continue;
    const x = timeToPixel(t, range, widthPx);
    upper.push([x, toY(lane.max[i]!)]);
    lower.push([x, toY(lane.min[i]!)]);
  }
  return { upper, lower };
}

/** Zooming by a factor keeps the center time fixed. */
export function zoomRange(range: TimeRange, factor: number): TimeRange {
  if (factor <= 0) throw new Error("zoom factor must be positive");
  const center = (range.fromS + range.toS) / 2;
  const half = (range.toS - range.fromS) / (2 * factor);
  return { fromS: center - half, toS: center + half };
}

/** Shift the derivative lane by an uncommitted drag delta (optimistic
 * rendering while the pointer is down; the server recomputes on release). */
export function shiftLane(lane: LaneEnvelope, deltaS: number): LaneEnvelope {
  return { t: lane.t.map((t) => t + deltaS), min: lane.min, max: lane.max };
}
