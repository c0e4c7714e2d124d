import { describe, expect, it } from "vitest";

import { barFraction, dbfs, LevelMeter } from "../src/meter.js";

function sine(amplitude: number, n: number, cyclesPerWindow = 32): Float32Array {
  const out = new Float32Array(n);
  for (let i = 0; i < n; i++) {
    out[i] = amplitude * Math.sin((2 * Math.PI * cyclesPerWindow * i) / n);
  }
  return out;
}

describe("dbfs", () => {
  it("reads 0 dB for a full-scale sine", () => {
    expect(dbfs(sine(1.0, 4096))).toBeCloseTo(0, 2);
  });

  it("reads -20 dB for a tenth-scale sine", () => {
    expect(dbfs(sine(0.1, 4096))).toBeCloseTo(-20, 2);
  });

  it("floors at -120 dB on silence and on empty input", () => {
    expect(dbfs(new Float32Array(512))).toBe(-120);
    expect(dbfs(new Float32Array(0))).toBe(-120);
  });
});

describe("LevelMeter", () => {
  it("tracks the most recent window only", () => {
    const meter = new LevelMeter(8000); // window of 800 samples
    meter.push(sine(1.0, 4096));
    // partial cycles in the 800-sample tail cost a tenth of a dB or so
    expect(meter.level()).toBeCloseTo(0, 0);
    // a quieter tail should wipe the loud history out of the window
    meter.push(sine(0.1, 4096));
    expect(meter.level()).toBeCloseTo(-20, 0);
  });

  it("is silent before any audio arrives and after reset", () => {
    const meter = new LevelMeter(8000);
    expect(meter.level()).toBe(-120);
    meter.push(sine(0.5, 1024));
    expect(meter.level()).toBeGreaterThan(-120);
    meter.reset();
    expect(meter.level()).toBe(-120);
  });

  it("handles chunks smaller than the window", () => {
    const meter = new LevelMeter(44100);
    for (let i = 0; i < 4; i++) meter.push(sine(0.1, 256));
    expect(meter.level()).toBeCloseTo(-20, 0);
  });
});

describe("barFraction", () => {
  it("spans the floor to full scale", () => {
    expect(barFraction(-120)).toBe(0);
    expect(barFraction(-60)).toBe(0);
    expect(barFraction(0)).toBe(1);
    expect(barFraction(-30)).toBeCloseTo(0.5, 6);
  });
});
