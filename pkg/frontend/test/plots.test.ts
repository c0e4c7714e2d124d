import { describe, expect, it } from "vitest";

import type { AnalysisResult } from "../src/api.js";
import {
  dataDomains,
  datasetFromAnalysis,
  datasetFromSessions,
  powerPanel,
  recoveredPanel,
  responsePanel,
  STYLE,
  type AverageDoc,
} from "../src/plots.js";

function analysis(id: string, scale = 1): AnalysisResult {
  const n = 64;
  const timeAxis = Array.from({ length: n }, (_, k) => (k - 16) / 100);
  return {
    schema: "pitchprobe.analysis/1",
    session_id: id,
    rate: 8000,
    t_r: 2048,
    f_target: 130,
    seeds: [73, 83, 149],
    n_cycles: 10,
    residual_level: 0.3,
    peak_cents: 2,
    latency_ms: 50,
    significant: true,
    plot_decimation: 16,
    time_axis: timeAxis,
    perturbation_pulse: timeAxis.map((t) => Math.exp(-((t * 40) ** 2))),
    response: timeAxis.map((t) => scale * Math.sin(t * 10)),
    residual: timeAxis.map((t) => 0.1 * Math.cos(t * 25)),
  };
}

function averageOf(a: AnalysisResult): AverageDoc {
  return {
    timeS: a.time_axis,
    response: a.response,
    perturbationPulse: a.perturbation_pulse,
    randomMean: a.residual,
  };
}

describe("responsePanel", () => {
  it("renders eight sessions plus average, pulse and random as 11 series", () => {
    const analyses = Array.from({ length: 8 }, (_, i) =>
      analysis(`s-${i}`, 1 + i / 10),
    );
    const panel = responsePanel(
      datasetFromSessions(analyses, averageOf(analyses[0]!)),
    );
    expect(panel.series.length).toBe(11);
    expect(panel.placeholder).toBeNull();

    const sessionSeries = panel.series.slice(0, 8);
    for (const s of sessionSeries) {
      expect(s.stroke).toBe(STYLE.session.stroke);
      expect(s.width).toBe(STYLE.session.width);
    }
    const labels = panel.series.slice(8).map((s) => s.label);
    expect(labels).toEqual(["average", "perturbation pulse", "random mean"]);
  });

  it("emphasizes the average over the individual traces", () => {
    const panel = responsePanel(
      datasetFromSessions([analysis("a")], averageOf(analysis("a"))),
    );
    const mean = panel.series.find((s) => s.label === "average")!;
    const single = panel.series[0]!;
    expect(mean.width).toBeGreaterThan(single.width);
    expect(single.stroke).not.toBe(mean.stroke);
  });

  it("uses the styling split: gray sessions, black mean, blue pulse, dark yellow random", () => {
    const panel = responsePanel(
      datasetFromSessions([analysis("a")], averageOf(analysis("a"))),
    );
    const byLabel = Object.fromEntries(panel.series.map((s) => [s.label, s]));
    expect(byLabel["average"]!.stroke).toBe("#111111");
    expect(byLabel["perturbation pulse"]!.stroke).toBe("#1565c0");
    expect(byLabel["random mean"]!.stroke).toBe("#b8860b");
  });

  it("overlays the mean exactly on a single session", () => {
    const a = analysis("only");
    const panel = responsePanel(datasetFromSessions([a], averageOf(a)));
    const mean = panel.series.find((s) => s.label === "average")!;
    const single = panel.series[0]!;
    expect(mean.x).toEqual(single.x);
    expect(mean.y).toEqual(single.y);
  });

  it("shows a placeholder for an empty dataset", () => {
    const panel = responsePanel(datasetFromSessions([]));
    expect(panel.series.length).toBe(0);
    expect(panel.placeholder).toMatch(/no analyzed sessions/);
  });

  it("plots time in milliseconds", () => {
    const a = analysis("ms");
    const panel = responsePanel(datasetFromAnalysis(a));
    const mean = panel.series.find((s) => s.label === "average")!;
    expect(mean.x[0]).toBeCloseTo(a.time_axis[0]! * 1000, 9);
    expect(panel.xLabel).toContain("ms");
  });
});

describe("single-session panels", () => {
  it("builds the final-response panel from one analysis", () => {
    const panel = responsePanel(datasetFromAnalysis(analysis("solo")));
    expect(panel.series.map((s) => s.label)).toEqual([
      "average",
      "perturbation pulse",
      "random mean",
    ]);
  });

  it("builds the recovered panel with response and random rows", () => {
    const panel = recoveredPanel(analysis("rec"));
    expect(panel.series.map((s) => s.label)).toEqual(["response", "random"]);
    expect(panel.yLabel).toBe("cents");
  });
});

describe("powerPanel", () => {
  it("carries the session title and one level series", () => {
    const panel = powerPanel("x/recording.wav (f_o 130 Hz)", [0.5, 1.0], [-21, -19]);
    expect(panel.title).toContain("recording.wav");
    expect(panel.series.length).toBe(1);
    expect(panel.series[0]!.x).toEqual([500, 1000]);
    expect(panel.placeholder).toBeNull();
  });

  it("falls back to a placeholder with no samples", () => {
    const panel = powerPanel("t", [], []);
    expect(panel.placeholder).toBeTruthy();
  });
});

describe("dataDomains", () => {
  it("covers the data with a little vertical padding", () => {
    const panel = powerPanel("t", [0, 1], [-30, -10]);
    const { x, y } = dataDomains(panel);
    expect(x.min).toBe(0);
    expect(x.max).toBe(1000);
    expect(y.min).toBeLessThan(-30);
    expect(y.max).toBeGreaterThan(-10);
  });

  it("keeps a flat series visible", () => {
    const panel = powerPanel("t", [0, 1], [-20, -20]);
    const { y } = dataDomains(panel);
    expect(y.max - y.min).toBeGreaterThan(0.5);
  });

  it("degrades gracefully on an empty model", () => {
    const { x, y } = dataDomains(powerPanel("t", [], []));
    expect(x.max).toBeGreaterThan(x.min);
    expect(y.max).toBeGreaterThan(y.min);
  });
});
