/** Session flow orchestration.
 *
 * Drives START (stream capture to the service), SAVE and ANALYZE, and
 * keeps the three display panels up to date. All numbers shown come
 * back from the service; nothing is recomputed here beyond the local
 * input-level bar.
 */

import {
  ApiError,
  type AnalysisResult,
  type MeasurementConfig,
  type ServiceClient,
  type SessionRecord,
  type SocketLike,
} from "./api.js";
import type { CaptureSource } from "./capture.js";
import { LevelMeter } from "./meter.js";
import {
  datasetFromAnalysis,
  powerPanel,
  recoveredPanel,
  responsePanel,
  type PanelModel,
} from "./plots.js";
import {
  controls,
  initialView,
  transition,
  type Controls,
  type SessionView,
  type UiEvent,
} from "./state.js";

const METER_EVERY_FRAMES = 4;

export interface Panels {
  power: PanelModel | null;
  recovered: PanelModel | null;
  response: PanelModel | null;
}

function openSocket(sock: SocketLike): Promise<void> {
  return new Promise((resolve, reject) => {
    sock.onopen = () => resolve();
    sock.onerror = () => reject(new Error("capture socket failed"));
  });
}

export class SessionController {
  view: SessionView = initialView();
  panels: Panels = { power: null, recovered: null, response: null };
  record: SessionRecord | null = null;
  analysis: AnalysisResult | null = null;

  private levelMeter: LevelMeter | null = null;
  private meterTimesS: number[] = [];
  private meterLevelsDb: number[] = [];

  constructor(
    private readonly client: ServiceClient,
    private readonly onChange: ((c: SessionController) => void) | null = null,
  ) {}

  private apply(ev: UiEvent): void {
    this.view = transition(this.view, ev);
    this.onChange?.(this);
  }

  controls(): Controls {
    return controls(this.view);
  }

  meterLevel(): number {
    return this.levelMeter ? this.levelMeter.level() : -120;
  }

  private fail(err: unknown): void {
    let kind: "permission" | "conflict" | "network" = "network";
    if (err instanceof ApiError && err.status === 409) kind = "conflict";
    if (err instanceof DOMException && err.name === "NotAllowedError") {
      kind = "permission";
    }
    const message = err instanceof Error ? err.message : String(err);
    this.apply({ type: "error", error: { kind, message } });
  }

  async newSession(overrides?: Partial<MeasurementConfig>): Promise<void> {
    try {
      const record = await this.client.createSession(overrides);
      this.record = record;
      this.analysis = null;
      this.panels = { power: null, recovered: null, response: null };
      this.meterTimesS = [];
      this.meterLevelsDb = [];
      this.apply({ type: "session", record });
    } catch (err) {
      this.fail(err);
    }
  }

  /** START: stream a capture source to the service until it runs dry. */
  async runCapture(source: CaptureSource): Promise<void> {
    if (!this.record || !this.controls().start) {
      this.fail(new ApiError(409, "capture is not available in this state"));
      return;
    }
    const id = this.record.id;
    const cfg = this.record.config;
    const expected =
      source.expectedSamples ?? Math.round(cfg.total_duration * cfg.rate);
    let sock: SocketLike | null = null;
    try {
      await this.client.start(id);
      sock = this.client.captureSocket(id);
      await openSocket(sock);
      this.levelMeter = new LevelMeter(source.rate);
      this.meterTimesS = [];
      this.meterLevelsDb = [];
      this.apply({ type: "capture-start" });

      let index = 0;
      let frames = 0;
      for await (const chunk of source.chunks()) {
        this.client.sendFrame(sock, index, chunk);
        this.levelMeter.push(chunk);
        index += chunk.length;
        frames += 1;
        if (frames % METER_EVERY_FRAMES === 0) {
          await this.sampleMeter(id, index / cfg.rate, index / expected);
        }
      }
      await this.sampleMeter(id, index / cfg.rate, 1);
      sock.close();
      this.apply({ type: "capture-done" });
      this.panels.power = powerPanel(
        this.view.title,
        this.meterTimesS,
        this.meterLevelsDb,
      );
      this.onChange?.(this);
    } catch (err) {
      sock?.close();
      this.fail(err);
    }
  }

  private async sampleMeter(
    id: string,
    timeS: number,
    fraction: number,
  ): Promise<void> {
    const reading = await this.client.meter(id);
    this.meterTimesS.push(timeS);
    this.meterLevelsDb.push(reading.dbfs);
    this.apply({
      type: "capture-progress",
      fraction: Math.min(1, fraction),
      dbfs: reading.dbfs,
      overruns: reading.overruns,
    });
  }

  async save(): Promise<void> {
    if (!this.record || !this.controls().save) {
      this.fail(new ApiError(409, "no completed recording to save"));
      return;
    }
    try {
      const record = await this.client.save(this.record.id);
      this.record = record;
      this.apply({ type: "saved", record });
    } catch (err) {
      this.fail(err);
    }
  }

  async analyze(): Promise<void> {
    if (!this.record || !this.controls().analyze) {
      this.fail(new ApiError(409, "analysis does not precede saving"));
      return;
    }
    try {
      const analysis = await this.client.analyze(this.record.id);
      this.analysis = analysis;
      this.apply({ type: "analyzed" });
      this.panels.recovered = recoveredPanel(analysis);
      this.panels.response = responsePanel(datasetFromAnalysis(analysis));
      this.onChange?.(this);
    } catch (err) {
      this.fail(err);
    }
  }
}
