// Bounded time-window ring for trajectory history (last 60 s by default).

export interface Timed {
  t_us: number;
}

export class TimedRing<T extends Timed> {
  private items: T[] = [];

  constructor(
    private readonly windowUs: number = 60_000_000,
    private readonly maxItems: number = 4096,
  ) {}

  push(item: T): void {
    this.items.push(item);
    const cutoff = item.t_us - this.windowUs;
    let drop = 0;
    while (drop < this.items.length && this.items[drop].t_us < cutoff) drop++;
    if (drop > 0) this.items = this.items.slice(drop);
    if (this.items.length > this.maxItems) {
      this.items = this.items.slice(this.items.length - this.maxItems);
    }
  }

  all(): readonly T[] {
    return this.items;
  }

  get length(): number {
    return this.items.length;
  }

  last(): T | undefined {
    return this.items[this.items.length - 1];
  }

  clear(): void {
    this.items = [];
  }
}
