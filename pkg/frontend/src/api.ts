/** Typed client for the measurement service.
 *
 * Capture frames go over a websocket as binary blobs: an 8-byte
 * little-endian uint64 carrying the index of the first sample, followed
 * by float32 PCM. Sample indexing is what lets the service count
 * dropped blocks instead of guessing from wall-clock time.
 */

export interface MeasurementConfig {
  rate: number;
  t_r: number;
  total_duration: number;
  f_target: number;
  modulation_sd: number;
  smoothing_length: number;
  seeds: number[];
  harmonics: number[];
  phase_mode: string;
  phase_seed: number;
  tsp_duration: number;
}

export type SessionStatus = "created" | "recorded" | "analyzed";

export interface SessionRecord {
  schema: string;
  id: string;
  created_at: string;
  status: SessionStatus;
  mode: string;
  config: MeasurementConfig;
  clock_offset_samples: number;
  overruns: number;
  capturing?: boolean;
}

export interface AnalysisResult {
  schema: string;
  session_id: string | null;
  rate: number;
  t_r: number;
  f_target: number;
  seeds: number[];
  n_cycles: number;
  residual_level: number;
  peak_cents: number;
  latency_ms: number | null;
  significant: boolean;
  plot_decimation: number;
  time_axis: number[];
  perturbation_pulse: number[];
  response: number[];
  residual: number[];
}

export interface MeterReading {
  dbfs: number;
  overruns: number;
}

/** Subset of WebSocket the client relies on, so tests can substitute one. */
export interface SocketLike {
  binaryType: string;
  send(data: ArrayBuffer | string): void;
  close(code?: number, reason?: string): void;
  onopen: ((ev: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev: { code: number }) => void) | null;
  onerror: ((ev: unknown) => void) | null;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;
export type SocketFactory = (url: string) => SocketLike;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

async function raiseForStatus(res: Response): Promise<void> {
  if (res.ok) return;
  let detail = `${res.status}`;
  try {
    const body = await res.json();
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(res.status, detail);
}

export interface ClientOptions {
  fetchImpl?: FetchLike;
  socketFactory?: SocketFactory;
}

export class ServiceClient {
  private readonly api: string;
  private readonly fetchImpl: FetchLike;
  private readonly socketFactory: SocketFactory;

  constructor(base = "", opts: ClientOptions = {}) {
    this.api = base.replace(/\/$/, "") + "/api/v1";
    this.fetchImpl =
      opts.fetchImpl ?? ((url, init) => globalThis.fetch(url, init));
    this.socketFactory =
      opts.socketFactory ?? ((url) => new WebSocket(url) as SocketLike);
  }

  private async json<T>(url: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(this.api + url, init);
    await raiseForStatus(res);
    return (await res.json()) as T;
  }

  private async binary(url: string): Promise<ArrayBuffer> {
    const res = await this.fetchImpl(this.api + url);
    await raiseForStatus(res);
    return res.arrayBuffer();
  }

  private post(url: string, body?: unknown): RequestInit & { method: string } {
    return {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body ?? {}),
    };
  }

  wsUrl(path: string): string {
    if (this.api.startsWith("http")) {
      return this.api.replace(/^http/, "ws") + path;
    }
    const loc = globalThis.location;
    const scheme = loc.protocol === "https:" ? "wss:" : "ws:";
    return `${scheme}//${loc.host}${this.api}${path}`;
  }

  createSession(
    config?: Partial<MeasurementConfig>,
    mode = "live",
  ): Promise<SessionRecord> {
    return this.json("/sessions", this.post("", { config: config ?? {}, mode }));
  }

  listSessions(): Promise<SessionRecord[]> {
    return this.json("/sessions");
  }

  getSession(id: string): Promise<SessionRecord> {
    return this.json(`/sessions/${id}`);
  }

  updateConfig(
    id: string,
    overrides: Partial<MeasurementConfig>,
  ): Promise<SessionRecord> {
    return this.json(`/sessions/${id}/config`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ config: overrides }),
    });
  }

  stimulusWav(id: string): Promise<ArrayBuffer> {
    return this.binary(`/sessions/${id}/stimulus.wav`);
  }

  start(id: string): Promise<{ capture: string; meter: string }> {
    return this.json(`/sessions/${id}/start`, this.post(""));
  }

  captureSocket(id: string): SocketLike {
    const sock = this.socketFactory(this.wsUrl(`/sessions/${id}/capture`));
    sock.binaryType = "arraybuffer";
    return sock;
  }

  meterSocket(id: string): SocketLike {
    return this.socketFactory(this.wsUrl(`/sessions/${id}/meter/stream`));
  }

  /** Pack one capture frame: sample index then float32 payload. */
  static frame(index: number, samples: Float32Array): ArrayBuffer {
    const buf = new ArrayBuffer(8 + samples.length * 4);
    new DataView(buf).setBigUint64(0, BigInt(index), true);
    // float32 payload is host-endian; every supported browser is LE
    new Float32Array(buf, 8).set(samples);
    return buf;
  }

  sendFrame(sock: SocketLike, index: number, samples: Float32Array): void {
    sock.send(ServiceClient.frame(index, samples));
  }

  meter(id: string): Promise<MeterReading> {
    return this.json(`/sessions/${id}/meter`);
  }

  save(id: string): Promise<SessionRecord> {
    return this.json(`/sessions/${id}/save`, this.post(""));
  }

  analyze(id: string, recordingAnchor?: number): Promise<AnalysisResult> {
    const body =
      recordingAnchor === undefined
        ? {}
        : { recording_anchor: recordingAnchor };
    return this.json(`/sessions/${id}/analyze`, this.post("", body));
  }

  results(id: string): Promise<AnalysisResult> {
    return this.json(`/sessions/${id}/results`);
  }

  noiseWav(duration = 2.0): Promise<ArrayBuffer> {
    return this.binary(`/calibration/noise.wav?duration=${duration}`);
  }

  getOffset(): Promise<{ offset_samples: number }> {
    return this.json("/calibration/offset");
  }

  setOffset(offsetSamples: number): Promise<{ offset_samples: number }> {
    return this.json(
      "/calibration/offset",
      this.post("", { offset_samples: offsetSamples }),
    );
  }

  measureOffset(id: string): Promise<{ offset_samples: number }> {
    return this.json(`/sessions/${id}/calibration/measure`, this.post(""));
  }
}
