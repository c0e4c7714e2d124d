/** Input level metering.
 *
 * Levels are sine-referenced dBFS: a full-scale sine reads 0 dB. The
 * same convention the service uses, so the on-screen bar and the
 * service meter endpoint agree to within the window alignment.
 */

const FLOOR_DB = -120;
const WINDOW_S = 0.1;

export function dbfs(samples: ArrayLike<number>): number {
  let acc = 0;
  for (let i = 0; i < samples.length; i++) {
    const v = samples[i]!;
    acc += v * v;
  }
  if (samples.length === 0 || acc === 0) return FLOOR_DB;
  const rms = Math.sqrt(acc / samples.length);
  return Math.max(FLOOR_DB, 20 * Math.log10(rms * Math.SQRT2));
}

/** Rolling level over the most recent ~100 ms of pushed audio. */
export class LevelMeter {
  private readonly want: number;
  private readonly ring: Float32Array;
  private head = 0;
  private filled = 0;

  constructor(rate: number) {
    this.want = Math.max(1, Math.round(rate * WINDOW_S));
    this.ring = new Float32Array(this.want);
  }

  push(chunk: Float32Array): void {
    for (let i = 0; i < chunk.length; i++) {
      this.ring[this.head] = chunk[i]!;
      this.head = (this.head + 1) % this.want;
      if (this.filled < this.want) this.filled++;
    }
  }

  level(): number {
    if (this.filled === 0) return FLOOR_DB;
    return dbfs(this.ring.subarray(0, this.filled));
  }

  reset(): void {
    this.head = 0;
    this.filled = 0;
  }
}

/** Map a level to a 0..1 bar fraction for display. */
export function barFraction(levelDb: number, floorDb = -60): number {
  if (levelDb <= floorDb) return 0;
  if (levelDb >= 0) return 1;
  return 1 - levelDb / floorDb;
}
