// Session state: everything the console shows, derived purely from
// received bridge messages. No simulation happens client-side.

import type {
  BridgeMessage,
  FailsafeEvent,
  GestureEvent,
  LatencySample,
  ScenarioContext,
  Telemetry,
} from "./messages.js";
import { TimedRing } from "./ring.js";
import { RollingStats } from "./stats.js";

export type ConnectionStatus = "connecting" | "connected" | "reconnecting" | "closed";

export interface ChannelSettings {
  channel: string;
  delayLoMs: number;
  delayHiMs: number;
  dropProb: number;
}

export class SessionState {
  status: ConnectionStatus = "connecting";
  latest: Telemetry | null = null;
  trajectory = new TimedRing<Telemetry>();
  gestures: GestureEvent[] = [];
  commands: LatencySample[] = [];
  failsafe: FailsafeEvent | null = null;
  scenario: ScenarioContext | null = null;
  stream = new RollingStats();
  process = new RollingStats();
  endToEnd = new RollingStats();
  rttMs: number | null = null;
  telemetryCount = 0;
  geofenceRadiusM = 10;
  channelSettings: ChannelSettings = {
    channel: "video",
    delayLoMs: 80,
    delayHiMs: 120,
    dropProb: 0,
  };

  readonly feedLimit = 40;

  apply(msg: BridgeMessage): void {
    switch (msg.kind) {
      case "telemetry": {
        const t = msg.payload as unknown as Telemetry;
        this.latest = t;
        this.telemetryCount += 1;
        this.trajectory.push(t);
        break;
      }
      case "gesture_event": {
        const g = msg.payload as unknown as GestureEvent;
        this.gestures.push(g);
        if (this.gestures.length > this.feedLimit) this.gestures.shift();
        this.stream.push(g.stream_ms);
        this.process.push(g.process_ms);
        break;
      }
      case "latency_sample": {
        const c = msg.payload as unknown as LatencySample;
        this.commands.push(c);
        if (this.commands.length > this.feedLimit) this.commands.shift();
        if (typeof c.rtt_ms === "number") this.rttMs = c.rtt_ms;
        if (typeof c.end_to_end_est_ms === "number") this.endToEnd.push(c.end_to_end_est_ms);
        break;
      }
      case "failsafe_event": {
        this.failsafe = msg.payload as unknown as FailsafeEvent;
        break;
      }
      default:
        break;
    }
  }

  setScenario(ctx: ScenarioContext): void {
    this.scenario = ctx;
    this.geofenceRadiusM = ctx.geofence_radius_m;
  }

  onConnected(): void {
    this.status = "connected";
  }

  onDisconnected(): void {
    // history ring survives a reconnect and resumes appending
    this.status = "reconnecting";
  }

  deviationCm(): number | null {
    if (!this.latest || !this.scenario || this.scenario.planned_waypoints.length === 0) {
      return null;
    }
    const p: [number, number, number] = [this.latest.x_cm, this.latest.y_cm, this.latest.z_cm];
    const wps = this.scenario.planned_waypoints.map(
      (w) => [w[0] * 100, w[1] * 100, w[2] * 100] as [number, number, number],
    );
    if (wps.length === 1) return dist3(p, wps[0]);
    let best = Infinity;
    for (let i = 0; i + 1 < wps.length; i++) {
      best = Math.min(best, pointSegmentDistance(p, wps[i], wps[i + 1]));
    }
    return best;
  }
}

export function pointSegmentDistance(
  p: [number, number, number],
  a: [number, number, number],
  b: [number, number, number],
): number {
  const d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
  const seg2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
  let t = 0;
  if (seg2 > 0) {
    t = ((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1] + (p[2] - a[2]) * d[2]) / seg2;
    t = Math.max(0, Math.min(1, t));
  }
  const c: [number, number, number] = [a[0] + t * d[0], a[1] + t * d[1], a[2] + t * d[2]];
  return dist3(p, c);
}

function dist3(p: [number, number, number], q: [number, number, number]): number {
  return Math.hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]);
}
