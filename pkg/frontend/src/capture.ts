/** Capture sources.
 *
 * Both the microphone and the simulated fixture hand out audio the
 * same way: an async iterator of float32 chunks. The streaming loop in
 * the controller pulls from whichever source it is given, so the whole
 * session flow is testable without a browser audio stack.
 */

export interface CaptureSource {
  readonly rate: number;
  /** Total samples this source will deliver, if known in advance. */
  readonly expectedSamples: number | null;
  chunks(): AsyncGenerator<Float32Array>;
  stop(): void;
}

/** Replays a prepared buffer, e.g. a decoded stimulus file. */
export class FixtureSource implements CaptureSource {
  readonly expectedSamples: number;
  private stopped = false;

  constructor(
    private readonly samples: Float32Array,
    readonly rate: number,
    private readonly chunkSize = 4096,
  ) {
    this.expectedSamples = samples.length;
  }

  async *chunks(): AsyncGenerator<Float32Array> {
    for (let pos = 0; pos < this.samples.length; pos += this.chunkSize) {
      if (this.stopped) return;
      yield this.samples.subarray(
        pos,
        Math.min(pos + this.chunkSize, this.samples.length),
      );
      if ((pos / this.chunkSize) % 16 === 15) {
        // yield to the event loop so a long replay cannot starve it
        await new Promise((resolve) => setTimeout(resolve, 0));
      }
    }
  }

  stop(): void {
    this.stopped = true;
  }
}

interface QueueWaiter {
  resolve: (chunk: Float32Array | null) => void;
}

/** Unbounded push-to-pull adapter for callback-style audio sources. */
export class ChunkQueue {
  private readonly pending: Float32Array[] = [];
  private waiter: QueueWaiter | null = null;
  private closed = false;

  push(chunk: Float32Array): void {
    if (this.closed) return;
    if (this.waiter) {
      const w = this.waiter;
      this.waiter = null;
      w.resolve(chunk);
    } else {
      this.pending.push(chunk);
    }
  }

  close(): void {
    this.closed = true;
    if (this.waiter) {
      const w = this.waiter;
      this.waiter = null;
      w.resolve(null);
    }
  }

  next(): Promise<Float32Array | null> {
    const head = this.pending.shift();
    if (head !== undefined) return Promise.resolve(head);
    if (this.closed) return Promise.resolve(null);
    return new Promise((resolve) => {
      this.waiter = { resolve };
    });
  }
}

/** Live microphone via getUserMedia. Stops itself after maxSamples. */
export class MicSource implements CaptureSource {
  readonly expectedSamples: number | null;
  private readonly queue = new ChunkQueue();
  private context: AudioContext | null = null;
  private mediaStream: MediaStream | null = null;
  private delivered = 0;

  constructor(
    readonly rate: number,
    maxSamples: number | null = null,
  ) {
    this.expectedSamples = maxSamples;
  }

  async open(): Promise<void> {
    // NotAllowedError from here surfaces as a permission error upstream
    this.mediaStream = await navigator.mediaDevices.getUserMedia({
      audio: { channelCount: 1, echoCancellation: false, noiseSuppression: false },
    });
    this.context = new AudioContext({ sampleRate: this.rate });
    const input = this.context.createMediaStreamSource(this.mediaStream);
    const tap = this.context.createScriptProcessor(4096, 1, 1);
    tap.onaudioprocess = (ev) => {
      const block = ev.inputBuffer.getChannelData(0);
      let take = block.length;
      if (this.expectedSamples !== null) {
        take = Math.min(take, this.expectedSamples - this.delivered);
      }
      if (take <= 0) {
        this.stop();
        return;
      }
      this.delivered += take;
      this.queue.push(new Float32Array(block.subarray(0, take)));
      if (this.expectedSamples !== null && this.delivered >= this.expectedSamples) {
        this.stop();
      }
    };
    input.connect(tap);
    tap.connect(this.context.destination);
  }

  async *chunks(): AsyncGenerator<Float32Array> {
    for (;;) {
      const chunk = await this.queue.next();
      if (chunk === null) return;
      yield chunk;
    }
  }

  stop(): void {
    this.queue.close();
    this.mediaStream?.getTracks().forEach((t) => t.stop());
    void this.context?.close();
    this.mediaStream = null;
    this.context = null;
  }
}
