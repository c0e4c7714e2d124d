/** Plot view models and a small canvas renderer.
 *
 * Panels are built as plain data first (series with styling), then
 * drawn. Keeping the geometry pure means the interesting logic runs
 * under vitest without a browser; only paint() touches canvas.
 *
 * Styling of the response panel: individual session traces thin and
 * light gray, the average thick black, the perturbation pulse blue,
 * the averaged random trace dark yellow.
 */

import type { AnalysisResult } from "./api.js";

export interface Series {
  label: string;
  x: number[]; // milliseconds
  y: number[];
  stroke: string;
  width: number;
}

export interface PanelModel {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  placeholder: string | null;
}

export const STYLE = {
  session: { stroke: "#c4c4c4", width: 1 },
  mean: { stroke: "#111111", width: 2.5 },
  pulse: { stroke: "#1565c0", width: 1.5 },
  random: { stroke: "#b8860b", width: 1.5 },
  response: { stroke: "#111111", width: 1.8 },
  residual: { stroke: "#999999", width: 1 },
  power: { stroke: "#2e7d32", width: 1.5 },
} as const;

const toMs = (seconds: number[]): number[] => seconds.map((t) => t * 1000);

/** Top panel: captured level against session time. */
export function powerPanel(
  title: string,
  timesS: number[],
  levelsDb: number[],
): PanelModel {
  const series: Series[] =
    timesS.length === 0
      ? []
      : [
          {
            label: "input level",
            x: toMs(timesS),
            y: levelsDb,
            ...STYLE.power,
          },
        ];
  return {
    title,
    xLabel: "time (ms)",
    yLabel: "level (dBFS)",
    series,
    placeholder: series.length ? null : "no capture yet",
  };
}

/** Middle panel: the recovered deterministic and random rows. */
export function recoveredPanel(analysis: AnalysisResult): PanelModel {
  const x = toMs(analysis.time_axis);
  return {
    title: "recovered responses",
    xLabel: "time (ms)",
    yLabel: "cents",
    series: [
      { label: "response", x, y: analysis.response, ...STYLE.response },
      { label: "random", x, y: analysis.residual, ...STYLE.residual },
    ],
    placeholder: null,
  };
}

export interface SessionTrace {
  label: string;
  timeS: number[];
  cents: number[];
}

export interface AverageDoc {
  timeS: number[];
  response: number[];
  perturbationPulse: number[];
  randomMean: number[];
}

export interface ResponseDataset {
  sessions: SessionTrace[];
  average: AverageDoc | null;
}

/** Single analyzed session, presented in the averaged-plot styling. */
export function datasetFromAnalysis(analysis: AnalysisResult): ResponseDataset {
  return {
    sessions: [],
    average: {
      timeS: analysis.time_axis,
      response: analysis.response,
      perturbationPulse: analysis.perturbation_pulse,
      randomMean: analysis.residual,
    },
  };
}

/** Many analyzed sessions plus an averaged document from the service. */
export function datasetFromSessions(
  analyses: AnalysisResult[],
  average: AverageDoc | null = null,
): ResponseDataset {
  return {
    sessions: analyses.map((a) => ({
      label: a.session_id ?? "session",
      timeS: a.time_axis,
      cents: a.response,
    })),
    average,
  };
}

/** Bottom panel: per-session traces, their average, pulse and random mean. */
export function responsePanel(data: ResponseDataset): PanelModel {
  const series: Series[] = [];
  for (const s of data.sessions) {
    series.push({
      label: s.label,
      x: toMs(s.timeS),
      y: s.cents,
      ...STYLE.session,
    });
  }
  if (data.average) {
    const x = toMs(data.average.timeS);
    series.push({ label: "average", x, y: data.average.response, ...STYLE.mean });
    series.push({
      label: "perturbation pulse",
      x,
      y: data.average.perturbationPulse,
      ...STYLE.pulse,
    });
    series.push({
      label: "random mean",
      x,
      y: data.average.randomMean,
      ...STYLE.random,
    });
  }
  return {
    title: "response",
    xLabel: "time (ms)",
    yLabel: "cents",
    series,
    placeholder: series.length ? null : "no analyzed sessions",
  };
}

export interface Domain {
  min: number;
  max: number;
}

export function dataDomains(model: PanelModel): { x: Domain; y: Domain } {
  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const s of model.series) {
    for (const v of s.x) {
      if (v < xMin) xMin = v;
      if (v > xMax) xMax = v;
    }
    for (const v of s.y) {
      if (v < yMin) yMin = v;
      if (v > yMax) yMax = v;
    }
  }
  if (!Number.isFinite(xMin)) {
    return { x: { min: 0, max: 1 }, y: { min: 0, max: 1 } };
  }
  // keep a flat trace visible instead of collapsing the axis
  if (yMin === yMax) {
    yMin -= 1;
    yMax += 1;
  }
  const pad = (yMax - yMin) * 0.05;
  return { x: { min: xMin, max: xMax }, y: { min: yMin - pad, max: yMax + pad } };
}

const MARGIN = { left: 52, right: 10, top: 24, bottom: 30 };

/** Draw a panel onto a canvas 2d context. Browser-only. */
export function paint(
  ctx: CanvasRenderingContext2D,
  model: PanelModel,
  widthPx: number,
  heightPx: number,
): void {
  ctx.clearRect(0, 0, widthPx, heightPx);
  ctx.font = "12px system-ui, sans-serif";
  ctx.fillStyle = "#222";
  ctx.fillText(model.title, MARGIN.left, 15);

  const plotW = widthPx - MARGIN.left - MARGIN.right;
  const plotH = heightPx - MARGIN.top - MARGIN.bottom;
  if (plotW <= 0 || plotH <= 0) return;

  if (model.placeholder) {
    ctx.fillStyle = "#888";
    ctx.fillText(
      model.placeholder,
      MARGIN.left + plotW / 2 - 40,
      MARGIN.top + plotH / 2,
    );
    return;
  }

  const { x, y } = dataDomains(model);
  const sx = (v: number) =>
    MARGIN.left + ((v - x.min) / (x.max - x.min || 1)) * plotW;
  const sy = (v: number) =>
    MARGIN.top + plotH - ((v - y.min) / (y.max - y.min || 1)) * plotH;

  ctx.strokeStyle = "#ddd";
  ctx.lineWidth = 1;
  ctx.strokeRect(MARGIN.left, MARGIN.top, plotW, plotH);
  if (y.min < 0 && y.max > 0) {
    ctx.beginPath();
    ctx.moveTo(MARGIN.left, sy(0));
    ctx.lineTo(MARGIN.left + plotW, sy(0));
    ctx.stroke();
  }

  for (const s of model.series) {
    ctx.strokeStyle = s.stroke;
    ctx.lineWidth = s.width;
    ctx.beginPath();
    for (let i = 0; i < s.x.length; i++) {
      const px = sx(s.x[i]!);
      const py = sy(s.y[i]!);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    }
    ctx.stroke();
  }

  ctx.fillStyle = "#555";
  ctx.fillText(model.xLabel, MARGIN.left + plotW - 60, heightPx - 8);
  ctx.save();
  ctx.translate(12, MARGIN.top + plotH / 2 + 30);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(model.yLabel, 0, 0);
  ctx.restore();
  ctx.fillStyle = "#555";
  ctx.fillText(x.min.toFixed(0), MARGIN.left, heightPx - 16);
  ctx.fillText(x.max.toFixed(0), MARGIN.left + plotW - 28, heightPx - 16);
  ctx.fillText(y.max.toFixed(1), 4, MARGIN.top + 10);
  ctx.fillText(y.min.toFixed(1), 4, MARGIN.top + plotH);
}
