// Reconnect backoff: exponential with a cap, reset on success.

export class Backoff {
  private attempt = 0;

  constructor(
    private readonly baseMs: number = 500,
    private readonly capMs: number = 8000,
  ) {}

  nextDelayMs(): number {
    const delay = Math.min(this.capMs, this.baseMs * 2 ** this.attempt);
    this.attempt += 1;
    return delay;
  }

  reset(): void {
    this.attempt = 0;
  }

  get attempts(): number {
    return this.attempt;
  }
}
