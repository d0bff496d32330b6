/** Fixed-capacity ring buffer for the dashboard's metrics history. */

export class RingBuffer<T> {
  private items: T[] = [];

  constructor(readonly capacity: number = 500) {
    if (capacity < 1) {
      throw new Error("capacity must be >= 1");
    }
  }

  push(item: T): void {
    this.items.push(item);
    if (this.items.length > this.capacity) {
      this.items.splice(0, this.items.length - this.capacity);
    }
  }

  get length(): number {
    return this.items.length;
  }

  toArray(): readonly T[] {
    return this.items;
  }

  clear(): void {
    this.items = [];
  }
}
