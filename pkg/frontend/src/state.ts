/** Session view state.
 *
 * The flow mirrors the service's record lifecycle: a capture must
 * complete before SAVE does anything, and ANALYZE is only reachable
 * from a saved recording. Everything here is a pure reducer so the
 * widget layer stays a thin shell.
 */

import type { MeasurementConfig, SessionRecord } from "./api.js";

export type Phase =
  | "idle"
  | "capturing"
  | "captured"
  | "saved"
  | "analyzed";

export type ErrorKind = "permission" | "overrun" | "conflict" | "network";

export interface UiError {
  kind: ErrorKind;
  message: string;
}

export interface SessionView {
  sessionId: string | null;
  title: string;
  phase: Phase;
  dbfs: number;
  overruns: number;
  progress: number; // streamed fraction of the stimulus, 0..1
  error: UiError | null;
}

export type UiEvent =
  | { type: "session"; record: SessionRecord }
  | { type: "capture-start" }
  | { type: "capture-progress"; fraction: number; dbfs: number; overruns: number }
  | { type: "capture-done" }
  | { type: "saved"; record: SessionRecord }
  | { type: "analyzed" }
  | { type: "error"; error: UiError }
  | { type: "dismiss-error" };

export function initialView(): SessionView {
  return {
    sessionId: null,
    title: "no session",
    phase: "idle",
    dbfs: -120,
    overruns: 0,
    progress: 0,
    error: null,
  };
}

function rangeText(values: number[]): string {
  // contiguous runs print as "a-b", everything else comma-separated
  if (values.length === 0) return "";
  const sorted = [...values].sort((a, b) => a - b);
  const parts: string[] = [];
  let start = sorted[0]!;
  let prev = start;
  for (const v of sorted.slice(1).concat([Number.NaN])) {
    if (v === prev + 1) {
      prev = v;
      continue;
    }
    parts.push(start === prev ? `${start}` : `${start}-${prev}`);
    start = prev = v;
  }
  return parts.join(",");
}

export function conditionSummary(config: MeasurementConfig): string {
  return (
    `f_o ${config.f_target} Hz, harmonics ${rangeText(config.harmonics)}, ` +
    `${config.total_duration} s, t_r ${config.t_r}`
  );
}

export function panelTitle(record: SessionRecord): string {
  return `${record.id}/recording.wav (${conditionSummary(record.config)})`;
}

export function transition(view: SessionView, ev: UiEvent): SessionView {
  switch (ev.type) {
    case "session": {
      const phase: Phase =
        ev.record.status === "analyzed"
          ? "analyzed"
          : ev.record.status === "recorded"
            ? "saved"
            : "idle";
      return {
        ...initialView(),
        sessionId: ev.record.id,
        title: panelTitle(ev.record),
        phase,
      };
    }
    case "capture-start":
      return { ...view, phase: "capturing", progress: 0, overruns: 0, error: null };
    case "capture-progress":
      return {
        ...view,
        progress: ev.fraction,
        dbfs: ev.dbfs,
        overruns: ev.overruns,
        error:
          ev.overruns > view.overruns
            ? { kind: "overrun", message: `${ev.overruns} dropped blocks` }
            : view.error,
      };
    case "capture-done":
      return { ...view, phase: "captured", progress: 1 };
    case "saved":
      return { ...view, phase: "saved", title: panelTitle(ev.record) };
    case "analyzed":
      return { ...view, phase: "analyzed" };
    case "error":
      return { ...view, error: ev.error };
    case "dismiss-error":
      return { ...view, error: null };
  }
}

export interface Controls {
  start: boolean;
  save: boolean;
  analyze: boolean;
}

export function controls(view: SessionView): Controls {
  return {
    start: view.sessionId !== null && view.phase === "idle",
    // a completed recording is the only thing SAVE may persist
    save: view.phase === "captured",
    analyze: view.phase === "saved",
  };
}
