// Reconnecting WebSocket with injectable constructor so tests can run
// under node while the browser uses the native implementation.

import { Backoff } from "./backoff.js";

export interface WsLike {
  onopen: ((ev: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev: unknown) => void) | null;
  onerror: ((ev: unknown) => void) | null;
  send(data: string): void;
  close(): void;
}

export type WsFactory = (url: string) => WsLike;

export interface SocketCallbacks {
  onText: (text: string) => void;
  onStatus: (status: "connecting" | "connected" | "reconnecting" | "closed") => void;
}

export class ReconnectingSocket {
  private ws: WsLike | null = null;
  private closed = false;
  private backoff = new Backoff();
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly url: string,
    private readonly callbacks: SocketCallbacks,
    private readonly factory: WsFactory = (u) =>
      new (globalThis as { WebSocket: new (url: string) => WsLike }).WebSocket(u),
  ) {}

  connect(): void {
    if (this.closed) return;
    this.callbacks.onStatus(this.backoff.attempts === 0 ? "connecting" : "reconnecting");
    let ws: WsLike;
    try {
      ws = this.factory(this.url);
    } catch {
      this.scheduleReconnect();
      return;
    }
    this.ws = ws;
    ws.onopen = () => {
      this.backoff.reset();
      this.callbacks.onStatus("connected");
    };
    ws.onmessage = (ev) => {
      if (typeof ev.data === "string") this.callbacks.onText(ev.data);
      else if (ev.data != null) this.callbacks.onText(String(ev.data));
    };
    ws.onerror = () => {
      /* close follows */
    };
    ws.onclose = () => {
      this.ws = null;
      if (!this.closed) this.scheduleReconnect();
    };
  }

  private scheduleReconnect(): void {
    if (this.closed) return;
    this.callbacks.onStatus("reconnecting");
    const delay = this.backoff.nextDelayMs();
    this.timer = setTimeout(() => this.connect(), delay);
  }

  send(text: string): boolean {
    if (!this.ws) return false;
    try {
      this.ws.send(text);
      return true;
    } catch {
      return false;
    }
  }

  close(): void {
    this.closed = true;
    if (this.timer) clearTimeout(this.timer);
    if (this.ws) this.ws.close();
    this.callbacks.onStatus("closed");
  }
}
