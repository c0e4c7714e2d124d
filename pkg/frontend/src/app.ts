/** Browser wiring: DOM, audio playback, microphone capture.
 *
 * Everything interesting lives in the controller and the pure modules;
 * this file only binds them to the page. It is intentionally left out
 * of the unit test suite.
 */

import { ServiceClient } from "./api.js";
import { FixtureSource, MicSource, type CaptureSource } from "./capture.js";
import { SessionController } from "./controller.js";
import { barFraction } from "./meter.js";
import { paint } from "./plots.js";
import { controls } from "./state.js";
import { decodeWav } from "./wav.js";

const client = new ServiceClient("");

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

const startBtn = byId<HTMLButtonElement>("btn-start");
const saveBtn = byId<HTMLButtonElement>("btn-save");
const analyzeBtn = byId<HTMLButtonElement>("btn-analyze");
const newBtn = byId<HTMLButtonElement>("btn-new");
const loopbackBox = byId<HTMLInputElement>("chk-loopback");
const statusLine = byId<HTMLDivElement>("status-line");
const errorBox = byId<HTMLDivElement>("error-box");
const meterFill = byId<HTMLDivElement>("meter-fill");
const meterText = byId<HTMLDivElement>("meter-text");
const canvases = {
  power: byId<HTMLCanvasElement>("panel-power"),
  recovered: byId<HTMLCanvasElement>("panel-recovered"),
  response: byId<HTMLCanvasElement>("panel-response"),
};

const phaseText: Record<string, string> = {
  idle: "ready",
  capturing: "playing and recording",
  captured: "recording complete, not saved",
  saved: "saved",
  analyzed: "analyzed",
};

function repaint(controller: SessionController): void {
  const c = controls(controller.view);
  startBtn.disabled = !c.start;
  saveBtn.disabled = !c.save;
  analyzeBtn.disabled = !c.analyze;
  const pct = Math.round(controller.view.progress * 100);
  statusLine.textContent =
    `${controller.view.title}\n` +
    `${phaseText[controller.view.phase] ?? controller.view.phase}` +
    (controller.view.phase === "capturing" ? ` (${pct}%)` : "") +
    (controller.view.overruns ? `, overruns: ${controller.view.overruns}` : "");
  if (controller.view.error) {
    errorBox.textContent = `${controller.view.error.kind}: ${controller.view.error.message}`;
    errorBox.hidden = false;
  } else {
    errorBox.hidden = true;
  }
  for (const [name, canvas] of Object.entries(canvases)) {
    const model = controller.panels[name as keyof typeof controller.panels];
    const ctx = canvas.getContext("2d");
    if (!ctx) continue;
    canvas.width = canvas.clientWidth;
    canvas.height = canvas.clientHeight;
    if (model) paint(ctx, model, canvas.width, canvas.height);
    else {
      ctx.clearRect(0, 0, canvas.width, canvas.height);
      ctx.font = "12px system-ui, sans-serif";
      ctx.fillStyle = "#999";
      ctx.fillText("waiting for data", 20, 24);
    }
  }
}

const ui = new SessionController(client, repaint);

function meterLoop(): void {
  const level = ui.meterLevel();
  meterFill.style.height = `${barFraction(level) * 100}%`;
  meterText.textContent = level <= -120 ? "quiet" : `${level.toFixed(1)} dB`;
  requestAnimationFrame(meterLoop);
}

async function playStimulus(bytes: ArrayBuffer): Promise<AudioBufferSourceNode> {
  const decoded = decodeWav(bytes);
  const context = new AudioContext({ sampleRate: decoded.rate });
  const buffer = context.createBuffer(1, decoded.samples.length, decoded.rate);
  buffer.getChannelData(0).set(decoded.samples);
  const node = context.createBufferSource();
  node.buffer = buffer;
  node.connect(context.destination);
  node.start();
  return node;
}

async function onStart(): Promise<void> {
  if (!ui.record) return;
  const cfg = ui.record.config;
  const bytes = await client.stimulusWav(ui.record.id);
  let source: CaptureSource;
  if (loopbackBox.checked) {
    // no microphone: feed the stimulus straight back, for bench checks
    source = new FixtureSource(decodeWav(bytes).samples, cfg.rate);
  } else {
    const mic = new MicSource(
      cfg.rate,
      Math.round(cfg.total_duration * cfg.rate),
    );
    await mic.open();
    source = mic;
    void playStimulus(bytes);
  }
  await ui.runCapture(source);
}

newBtn.addEventListener("click", () => void ui.newSession());
startBtn.addEventListener("click", () => void onStart().catch(console.error));
saveBtn.addEventListener("click", () => void ui.save());
analyzeBtn.addEventListener("click", () => void ui.analyze());
window.addEventListener("resize", () => repaint(ui));

// ---------------------------------------------------------------- calibration

const noiseBtn = byId<HTMLButtonElement>("btn-noise");
const offsetInput = byId<HTMLInputElement>("offset-input");
const offsetApply = byId<HTMLButtonElement>("btn-offset");
const offsetMeasure = byId<HTMLButtonElement>("btn-measure");
const calibText = byId<HTMLDivElement>("calib-text");

noiseBtn.addEventListener("click", () => {
  void (async () => {
    const bytes = await client.noiseWav(2.0);
    await playStimulus(bytes);
    calibText.textContent = "pink noise playing (2 s, -20 dBFS)";
  })().catch((err) => {
    calibText.textContent = String(err);
  });
});

offsetApply.addEventListener("click", () => {
  void (async () => {
    const value = Number(offsetInput.value);
    const res = await client.setOffset(value);
    calibText.textContent = `clock offset stored: ${res.offset_samples} samples`;
  })().catch((err) => {
    calibText.textContent = String(err);
  });
});

offsetMeasure.addEventListener("click", () => {
  void (async () => {
    if (!ui.record) throw new Error("create and record a loopback session first");
    const res = await client.measureOffset(ui.record.id);
    offsetInput.value = String(res.offset_samples);
    calibText.textContent = `measured offset: ${res.offset_samples.toFixed(2)} samples`;
  })().catch((err) => {
    calibText.textContent = String(err);
  });
});

async function boot(): Promise<void> {
  try {
    const off = await client.getOffset();
    offsetInput.value = String(off.offset_samples);
  } catch {
    // service not reachable yet; the first button press will report it
  }
  meterLoop();
}

void boot();
