// Console entry point: connect, render, inject, tune the channel.

import { GESTURE_NAMES, injectGesture, parseBridgeMessage, setChannel } from "./messages.js";
import type { ScenarioContext } from "./messages.js";
import { ReconnectingSocket } from "./socket.js";
import { SessionState } from "./state.js";
import { drawAltitudeStrip, drawTrajectory, gaugeClass } from "./render.js";

const state = new SessionState();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const statusDot = el<HTMLSpanElement>("status");
const failsafeBanner = el<HTMLDivElement>("failsafe");
const telemetryPanel = el<HTMLDivElement>("telemetry");
const gaugePanel = el<HTMLDivElement>("gauges");
const feed = el<HTMLUListElement>("feed");
const deviation = el<HTMLSpanElement>("deviation");

const wsUrl = `ws://${location.host}/ws`;
const socket = new ReconnectingSocket(wsUrl, {
  onText: (text) => {
    const msg = parseBridgeMessage(text);
    if (msg) state.apply(msg);
  },
  onStatus: (status) => {
    state.status = status;
    statusDot.textContent = status;
    statusDot.className = `status ${status}`;
  },
});
socket.connect();

fetch("/scenario.json")
  .then((r) => r.json())
  .then((ctx: ScenarioContext) => state.setScenario(ctx))
  .catch(() => undefined);

// gesture injection: buttons plus keys 1..6
const buttons = el<HTMLDivElement>("gestures");
GESTURE_NAMES.forEach((name, i) => {
  const button = document.createElement("button");
  button.textContent = `${i + 1} ${name}`;
  button.onclick = () => inject(name);
  buttons.appendChild(button);
});
document.addEventListener("keydown", (ev) => {
  const idx = ev.key.charCodeAt(0) - "1".charCodeAt(0);
  if (idx >= 0 && idx < GESTURE_NAMES.length) inject(GESTURE_NAMES[idx]);
});

function inject(name: string): void {
  const confidence = Number(el<HTMLInputElement>("confidence").value);
  const distance = Number(el<HTMLInputElement>("distance").value);
  socket.send(injectGesture(name.toLowerCase(), confidence, distance));
}

el<HTMLButtonElement>("apply-channel").onclick = () => {
  const lo = Number(el<HTMLInputElement>("delay-lo").value);
  const hi = Number(el<HTMLInputElement>("delay-hi").value);
  const drop = Number(el<HTMLInputElement>("drop").value);
  state.channelSettings = { channel: "video", delayLoMs: lo, delayHiMs: hi, dropProb: drop };
  socket.send(setChannel("video", { delayLoMs: lo, delayHiMs: hi, dropProb: drop }));
};
el<HTMLInputElement>("geofence").onchange = () => {
  state.geofenceRadiusM = Number(el<HTMLInputElement>("geofence").value);
};

const mapCanvas = el<HTMLCanvasElement>("map");
const altCanvas = el<HTMLCanvasElement>("altitude");

function renderFrame(): void {
  const map = mapCanvas.getContext("2d");
  if (map) drawTrajectory(map, state, mapCanvas.width, mapCanvas.height);
  const alt = altCanvas.getContext("2d");
  if (alt) drawAltitudeStrip(alt, state, altCanvas.width, altCanvas.height);

  const t = state.latest;
  telemetryPanel.textContent = t
    ? `pos (${(t.x_cm / 100).toFixed(2)}, ${(t.y_cm / 100).toFixed(2)}, ` +
      `${(t.z_cm / 100).toFixed(2)}) m  yaw ${t.yaw_deg}°  bat ${t.bat}%  mode ${t.mode}`
    : "no telemetry yet";

  const dev = state.deviationCm();
  deviation.textContent = dev === null ? "-" : `${dev.toFixed(0)} cm`;

  const processMean = state.process.mean();
  gaugePanel.innerHTML = "";
  const rows: Array<[string, string, string]> = [
    ["stream", `${state.stream.mean().toFixed(0)} ms`, "gauge"],
    ["process", `${processMean.toFixed(1)} ms`, gaugeClass(processMean)],
    ["rtt", state.rttMs === null ? "-" : `${state.rttMs.toFixed(1)} ms`, "gauge"],
    ["end-to-end", `${state.endToEnd.mean().toFixed(0)} ms`, "gauge"],
    ["p95 e2e", `${state.endToEnd.p95().toFixed(0)} ms`, "gauge"],
  ];
  for (const [label, value, cls] of rows) {
    const div = document.createElement("div");
    div.className = cls;
    div.textContent = `${label}: ${value}`;
    gaugePanel.appendChild(div);
  }

  failsafeBanner.textContent = state.failsafe
    ? `${state.failsafe.mode}: ${state.failsafe.cause}`
    : "";
  failsafeBanner.className = state.failsafe && state.failsafe.mode !== "normal"
    ? "banner active"
    : "banner";

  feed.innerHTML = "";
  const entries = [
    ...state.gestures.slice(-8).map((g) => ({
      t: g.t_us,
      text: `gesture ${GESTURE_NAMES[g.cls] ?? g.cls} conf ${g.confidence.toFixed(2)} @ ${g.distance_m.toFixed(1)} m`,
    })),
    ...state.commands.slice(-8).map((c) => ({
      t: c.t_us,
      text: `cmd ${c.verb}${c.magnitude != null ? " " + c.magnitude : ""} (${c.origin})`,
    })),
  ].sort((a, b) => b.t - a.t).slice(0, 12);
  for (const entry of entries) {
    const li = document.createElement("li");
    li.textContent = entry.text;
    feed.appendChild(li);
  }

  requestAnimationFrame(renderFrame);
}
requestAnimationFrame(renderFrame);
