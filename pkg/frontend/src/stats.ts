// Rolling window statistics for the latency gauges.

export class RollingStats {
  private values: number[] = [];

  constructor(private readonly capacity: number = 200) {}

  push(v: number): void {
    this.values.push(v);
    if (this.values.length > this.capacity) this.values.shift();
  }

  get count(): number {
    return this.values.length;
  }

  mean(): number {
    if (!this.values.length) return 0;
    return this.values.reduce((a, b) => a + b, 0) / this.values.length;
  }

  p95(): number {
    if (!this.values.length) return 0;
    const sorted = [...this.values].sort((a, b) => a - b);
    const idx = Math.min(sorted.length - 1, Math.ceil(0.95 * sorted.length) - 1);
    return sorted[idx];
  }

  last(): number | undefined {
    return this.values[this.values.length - 1];
  }
}
