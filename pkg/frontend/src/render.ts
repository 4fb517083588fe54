// Canvas rendering: top-down trajectory with planned path and geofence,
// an altitude strip, and latency gauges. Pure transform helpers are
// exported for unit tests.

import type { SessionState } from "./state.js";
import type { Telemetry } from "./messages.js";

export interface Viewport {
  width: number;
  height: number;
  metersAcross: number; // world meters spanned by the canvas width
  centerX: number; // world meters at canvas center
  centerY: number;
}

// World frame: x east, y north. Canvas: x right, y down, so north is up.
export function worldToCanvas(
  xM: number,
  yM: number,
  vp: Viewport,
): [number, number] {
  const scale = vp.width / vp.metersAcross;
  return [
    vp.width / 2 + (xM - vp.centerX) * scale,
    vp.height / 2 - (yM - vp.centerY) * scale,
  ];
}

export function fitViewport(
  width: number,
  height: number,
  trajectory: readonly Telemetry[],
  geofenceRadiusM: number,
): Viewport {
  let extent = Math.max(2.5, geofenceRadiusM * 1.15);
  for (const t of trajectory) {
    extent = Math.max(extent, Math.abs(t.x_cm / 100) * 1.3, Math.abs(t.y_cm / 100) * 1.3);
  }
  return { width, height, metersAcross: extent * 2, centerX: 0, centerY: 0 };
}

export function drawTrajectory(
  ctx: CanvasRenderingContext2D,
  state: SessionState,
  width: number,
  height: number,
): void {
  const points = state.trajectory.all();
  const vp = fitViewport(width, height, points, state.geofenceRadiusM);
  ctx.clearRect(0, 0, width, height);

  ctx.strokeStyle = "#2b3a4a";
  ctx.lineWidth = 1;
  const gridStep = Math.max(1, Math.round(vp.metersAcross / 10));
  for (let m = -Math.ceil(vp.metersAcross); m <= Math.ceil(vp.metersAcross); m += gridStep) {
    const [x0] = worldToCanvas(m, 0, vp);
    const [, y0] = worldToCanvas(0, m, vp);
    ctx.beginPath();
    ctx.moveTo(x0, 0);
    ctx.lineTo(x0, height);
    ctx.stroke();
    ctx.beginPath();
    ctx.moveTo(0, y0);
    ctx.lineTo(width, y0);
    ctx.stroke();
  }

  // geofence ring around home (origin)
  const [gx, gy] = worldToCanvas(0, 0, vp);
  const radiusPx = (state.geofenceRadiusM / vp.metersAcross) * width;
  ctx.strokeStyle = "#b8860b";
  ctx.setLineDash([6, 6]);
  ctx.beginPath();
  ctx.arc(gx, gy, radiusPx, 0, Math.PI * 2);
  ctx.stroke();
  ctx.setLineDash([]);

  // planned path overlay (top-down projection)
  const plan = state.scenario?.planned_waypoints ?? [];
  if (plan.length > 1) {
    ctx.strokeStyle = "#3c8f3c";
    ctx.lineWidth = 2;
    ctx.beginPath();
    plan.forEach((w, i) => {
      const [px, py] = worldToCanvas(w[0], w[1], vp);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }

  // flown trajectory
  if (points.length > 1) {
    ctx.strokeStyle = "#7dc4ff";
    ctx.lineWidth = 2;
    ctx.beginPath();
    points.forEach((t, i) => {
      const [px, py] = worldToCanvas(t.x_cm / 100, t.y_cm / 100, vp);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }

  // drone marker with heading
  const last = state.latest;
  if (last) {
    const [dx, dy] = worldToCanvas(last.x_cm / 100, last.y_cm / 100, vp);
    ctx.fillStyle = "#ff7d7d";
    ctx.beginPath();
    ctx.arc(dx, dy, 5, 0, Math.PI * 2);
    ctx.fill();
    const yaw = (last.yaw_deg * Math.PI) / 180;
    ctx.strokeStyle = "#ff7d7d";
    ctx.beginPath();
    ctx.moveTo(dx, dy);
    ctx.lineTo(dx + 12 * Math.cos(yaw), dy - 12 * Math.sin(yaw));
    ctx.stroke();
  }
}

export function drawAltitudeStrip(
  ctx: CanvasRenderingContext2D,
  state: SessionState,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  const points = state.trajectory.all();
  if (!points.length) return;
  const t0 = points[0].t_us;
  const t1 = Math.max(points[points.length - 1].t_us, t0 + 1);
  const zMax = Math.max(3.2, ...points.map((p) => p.z_cm / 100));
  ctx.strokeStyle = "#444";
  [1, 3].forEach((band) => {
    const y = height - (band / zMax) * (height - 6) - 3;
    ctx.setLineDash([3, 5]);
    ctx.beginPath();
    ctx.moveTo(0, y);
    ctx.lineTo(width, y);
    ctx.stroke();
  });
  ctx.setLineDash([]);
  ctx.strokeStyle = "#7dc4ff";
  ctx.lineWidth = 2;
  ctx.beginPath();
  points.forEach((p, i) => {
    const x = ((p.t_us - t0) / (t1 - t0)) * width;
    const y = height - (p.z_cm / 100 / zMax) * (height - 6) - 3;
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
}

export const PROCESS_BUDGET_MS = 30;

export function gaugeClass(processMeanMs: number): string {
  return processMeanMs > PROCESS_BUDGET_MS ? "gauge over" : "gauge";
}
