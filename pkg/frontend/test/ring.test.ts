import { describe, expect, test } from "vitest";
import { RingBuffer } from "../src/ring";

describe("RingBuffer", () => {
  test("holds everything while under capacity", () => {
    const ring = new RingBuffer(5);
    ring.push(1);
    ring.push(2);
    ring.push(3);
    expect(ring.length).toBe(3);
    expect(ring.values()).toEqual([1, 2, 3]);
    expect(ring.last()).toBe(3);
  });

  test("caps at capacity and keeps the newest samples", () => {
    const ring = new RingBuffer(300);
    for (let i = 0; i < 350; i += 1) {
      ring.push(i);
    }
    expect(ring.length).toBe(300);
    const vals = ring.values();
    expect(vals.length).toBe(300);
    expect(vals[0]).toBe(50);
    expect(vals[299]).toBe(349);
    expect(ring.last()).toBe(349);
  });

  test("stays bounded under sustained pushes", () => {
    const ring = new RingBuffer(3);
    for (let i = 0; i < 1000; i += 1) {
      ring.push(i);
      expect(ring.length).toBeLessThanOrEqual(3);
    }
    expect(ring.values()).toEqual([997, 998, 999]);
  });

  test("empty buffer has no last value", () => {
    const ring = new RingBuffer(4);
    expect(ring.length).toBe(0);
    expect(ring.values()).toEqual([]);
    expect(ring.last()).toBeUndefined();
  });

  test("rejects nonsensical capacities", () => {
    expect(() => new RingBuffer(0)).toThrow(RangeError);
    expect(() => new RingBuffer(-1)).toThrow(RangeError);
    expect(() => new RingBuffer(2.5)).toThrow(RangeError);
  });
});
