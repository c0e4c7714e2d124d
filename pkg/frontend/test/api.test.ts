import { describe, expect, it } from "vitest";

import { ApiError, ServiceClient } from "../src/api.js";
import { decodeWav } from "../src/wav.js";
import { dbfs } from "../src/meter.js";
import { FakeService } from "./fakesvc.js";

function makeClient(): { client: ServiceClient; svc: FakeService } {
  const svc = new FakeService();
  const client = new ServiceClient("http://fake", {
    fetchImpl: svc.fetchImpl,
    socketFactory: svc.socketFactory,
  });
  return { client, svc };
}

function openCapture(client: ServiceClient, id: string) {
  const sock = client.captureSocket(id);
  return new Promise<typeof sock>((resolve, reject) => {
    sock.onopen = () => resolve(sock);
    sock.onclose = (ev) => reject(new Error(`closed ${ev.code}`));
  });
}

describe("ServiceClient against the fake service", () => {
  it("creates a session with config overrides", async () => {
    const { client } = makeClient();
    const record = await client.createSession({ f_target: 150 });
    expect(record.status).toBe("created");
    expect(record.config.f_target).toBe(150);
    expect(record.config.rate).toBe(8000);
  });

  it("serves a decodable stimulus at the session rate", async () => {
    const { client } = makeClient();
    const record = await client.createSession();
    const wav = decodeWav(await client.stimulusWav(record.id));
    expect(wav.rate).toBe(record.config.rate);
    expect(wav.samples.length).toBe(
      Math.round(record.config.total_duration * record.config.rate),
    );
    // the fixture stimulus sits at -20 dBFS
    expect(dbfs(wav.samples)).toBeCloseTo(-20, 0);
  });

  it("streams capture frames and reads the meter back", async () => {
    const { client } = makeClient();
    const record = await client.createSession();
    await client.start(record.id);
    const sock = await openCapture(client, record.id);

    const chunk = new Float32Array(1600).fill(0.1 / Math.SQRT2); // dc at -20 dB
    client.sendFrame(sock, 0, chunk);
    client.sendFrame(sock, 1600, chunk);
    const reading = await client.meter(record.id);
    expect(reading.overruns).toBe(0);
    expect(reading.dbfs).toBeCloseTo(-20, 1);
    sock.close();
  });

  it("counts a gap in the sample indexing as an overrun", async () => {
    const { client } = makeClient();
    const record = await client.createSession();
    await client.start(record.id);
    const sock = await openCapture(client, record.id);
    const chunk = new Float32Array(1600).fill(0.05);
    client.sendFrame(sock, 0, chunk);
    client.sendFrame(sock, 4800, chunk); // skipped two blocks
    const reading = await client.meter(record.id);
    expect(reading.overruns).toBe(1);
    sock.close();
  });

  it("rejects the capture socket before start", async () => {
    const { client } = makeClient();
    const record = await client.createSession();
    await expect(openCapture(client, record.id)).rejects.toThrow(/4009/);
  });

  it("enforces the save-then-analyze order", async () => {
    const { client } = makeClient();
    const record = await client.createSession();
    await expect(client.analyze(record.id)).rejects.toMatchObject({
      status: 409,
    });
    await expect(client.results(record.id)).rejects.toMatchObject({
      status: 409,
    });
    await expect(client.save(record.id)).rejects.toMatchObject({ status: 409 });
  });

  it("surfaces 404 for unknown sessions", async () => {
    const { client } = makeClient();
    const err = await client.getSession("nope").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(404);
  });

  it("locks config once a recording is saved", async () => {
    const { client } = makeClient();
    const record = await client.createSession();
    await client.start(record.id);
    const sock = await openCapture(client, record.id);
    client.sendFrame(
      sock,
      0,
      new Float32Array(record.config.total_duration * record.config.rate).fill(
        0.01,
      ),
    );
    sock.close();
    await client.save(record.id);
    await expect(
      client.updateConfig(record.id, { f_target: 99 }),
    ).rejects.toMatchObject({ status: 409 });
  });

  it("updates config on a fresh session", async () => {
    const { client } = makeClient();
    const record = await client.createSession();
    const updated = await client.updateConfig(record.id, { f_target: 220 });
    expect(updated.config.f_target).toBe(220);
  });

  it("round-trips the calibration offset", async () => {
    const { client } = makeClient();
    expect((await client.getOffset()).offset_samples).toBe(0);
    await client.setOffset(7.25);
    expect((await client.getOffset()).offset_samples).toBe(7.25);
  });

  it("fetches pink noise at -20 dBFS", async () => {
    const { client } = makeClient();
    const wav = decodeWav(await client.noiseWav(1.0));
    expect(wav.samples.length).toBe(8000);
    expect(dbfs(wav.samples)).toBeCloseTo(-20, 1);
  });

  it("packs capture frames as index header plus float32 payload", () => {
    const frame = ServiceClient.frame(12345, new Float32Array([0.5, -0.25]));
    expect(frame.byteLength).toBe(16);
    const view = new DataView(frame);
    expect(Number(view.getBigUint64(0, true))).toBe(12345);
    expect(view.getFloat32(8, true)).toBeCloseTo(0.5, 7);
    expect(view.getFloat32(12, true)).toBeCloseTo(-0.25, 7);
  });
});
