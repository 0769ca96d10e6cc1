/** Fixed-capacity number buffer: push appends, dropping the oldest once full. */
export class RingBuffer {
  private readonly data: number[] = [];
  private head = 0;

  constructor(readonly capacity: number) {
    if (!Number.isInteger(capacity) || capacity <= 0) {
      throw new RangeError(`capacity must be a positive integer, got ${capacity}`);
    }
  }

  get length(): number {
    return this.data.length;
  }

  push(value: number): void {
    if (this.data.length < this.capacity) {
      this.data.push(value);
    } else {
      this.data[this.head] = value;
      this.head = (this.head + 1) % this.capacity;
    }
  }

  /** Copy of the samples, oldest first. */
  values(): number[] {
    return this.data.slice(this.head).concat(this.data.slice(0, this.head));
  }

  last(): number | undefined {
    const n = this.data.length;
    if (n === 0) {
      return undefined;
    }
    const idx = n < this.capacity ? n - 1 : (this.head + this.capacity - 1) % this.capacity;
    return this.data[idx];
  }
}
