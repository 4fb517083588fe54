import { describe, expect, it, vi } from "vitest";

import { ReconnectingSocket, type WsLike } from "../src/socket.js";

class FakeWs implements WsLike {
  onopen: ((ev: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: ((ev: unknown) => void) | null = null;
  onerror: ((ev: unknown) => void) | null = null;
  sent: string[] = [];
  send(data: string): void {
    this.sent.push(data);
  }
  close(): void {
    this.onclose?.(undefined);
  }
}

describe("ReconnectingSocket", () => {
  it("reports connected and forwards messages", () => {
    const ws = new FakeWs();
    const texts: string[] = [];
    const statuses: string[] = [];
    const socket = new ReconnectingSocket(
      "ws://test/ws",
      { onText: (t) => texts.push(t), onStatus: (s) => statuses.push(s) },
      () => ws,
    );
    socket.connect();
    ws.onopen?.(undefined);
    ws.onmessage?.({ data: "hello" });
    expect(statuses).toEqual(["connecting", "connected"]);
    expect(texts).toEqual(["hello"]);
    expect(socket.send("x")).toBe(true);
    expect(ws.sent).toEqual(["x"]);
  });

  it("schedules reconnect with backoff after close", () => {
    vi.useFakeTimers();
    const sockets: FakeWs[] = [];
    const statuses: string[] = [];
    const socket = new ReconnectingSocket(
      "ws://test/ws",
      { onText: () => undefined, onStatus: (s) => statuses.push(s) },
      () => {
        const ws = new FakeWs();
        sockets.push(ws);
        return ws;
      },
    );
    socket.connect();
    sockets[0].onopen?.(undefined);
    sockets[0].close(); // server died
    expect(statuses.at(-1)).toBe("reconnecting");
    vi.advanceTimersByTime(600);
    expect(sockets.length).toBe(2);
    sockets[1].onopen?.(undefined);
    expect(statuses.at(-1)).toBe("connected");
    socket.close();
    vi.useRealTimers();
  });

  it("stops reconnecting once closed", () => {
    vi.useFakeTimers();
    const sockets: FakeWs[] = [];
    const socket = new ReconnectingSocket(
      "ws://test/ws",
      { onText: () => undefined, onStatus: () => undefined },
      () => {
        const ws = new FakeWs();
        sockets.push(ws);
        return ws;
      },
    );
    socket.connect();
    socket.close();
    vi.advanceTimersByTime(60_000);
    expect(sockets.length).toBe(1);
    vi.useRealTimers();
  });
});
