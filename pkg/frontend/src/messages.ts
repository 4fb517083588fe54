// Bridge message types and parsing. Every value shown in the console
// traces back to one of these messages (or the static /scenario.json).

export type BridgeKind =
  | "telemetry"
  | "gesture_event"
  | "latency_sample"
  | "failsafe_event"
  | "inject_gesture"
  | "set_channel";

export interface BridgeMessage {
  kind: BridgeKind;
  payload: Record<string, unknown>;
}

export interface Telemetry {
  t_us: number;
  x_cm: number;
  y_cm: number;
  z_cm: number;
  yaw_deg: number;
  bat: number;
  mode: string;
  sp_x_cm: number;
  sp_y_cm: number;
  sp_z_cm: number;
  yaw_sp_deg: number;
}

export interface GestureEvent {
  cls: number;
  confidence: number;
  frame_seq: number;
  stream_ms: number;
  process_ms: number;
  distance_m: number;
  t_us: number;
}

export interface LatencySample {
  verb: string;
  magnitude: number | null;
  origin: string;
  rtt_ms: number | null;
  end_to_end_est_ms?: number;
  t_us: number;
}

export interface FailsafeEvent {
  mode: string;
  cause: string;
}

export interface ScenarioContext {
  name: string;
  planned_waypoints: number[][];
  geofence_radius_m: number;
  duration_s: number;
  decision_slot_ms: number;
}

export const GESTURE_NAMES = [
  "Palm",
  "Fist",
  "ThumbUp",
  "ThumbDown",
  "PointLeft",
  "PointRight",
] as const;

const KINDS: ReadonlySet<string> = new Set([
  "telemetry",
  "gesture_event",
  "latency_sample",
  "failsafe_event",
  "inject_gesture",
  "set_channel",
]);

export function parseBridgeMessage(text: string): BridgeMessage | null {
  let obj: unknown;
  try {
    obj = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof obj !== "object" || obj === null) return null;
  const rec = obj as Record<string, unknown>;
  if (typeof rec.kind !== "string" || !KINDS.has(rec.kind)) return null;
  const payload = rec.payload;
  if (typeof payload !== "object" || payload === null) return null;
  return { kind: rec.kind as BridgeKind, payload: payload as Record<string, unknown> };
}

export function serializeBridgeMessage(msg: BridgeMessage): string {
  return JSON.stringify({ kind: msg.kind, payload: msg.payload });
}

export function injectGesture(cls: string, confidence: number, distanceM: number): string {
  return serializeBridgeMessage({
    kind: "inject_gesture",
    payload: { class: cls, confidence, distance_m: distanceM },
  });
}

export function setChannel(
  channel: string,
  opts: { delayMs?: number; delayLoMs?: number; delayHiMs?: number; dropProb?: number },
): string {
  const payload: Record<string, unknown> = { channel };
  if (opts.delayLoMs !== undefined || opts.delayHiMs !== undefined) {
    payload.delay_lo_ms = opts.delayLoMs ?? 0;
    payload.delay_hi_ms = opts.delayHiMs ?? opts.delayLoMs ?? 0;
  } else if (opts.delayMs !== undefined) {
    payload.delay_ms = opts.delayMs;
  }
  if (opts.dropProb !== undefined) payload.drop_prob = opts.dropProb;
  return serializeBridgeMessage({ kind: "set_channel", payload });
}
