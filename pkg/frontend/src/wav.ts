/** Minimal RIFF/WAVE reader for the mono PCM files the service emits. */

export interface DecodedWav {
  rate: number;
  samples: Float32Array;
}

function ascii(view: DataView, pos: number): string {
  return String.fromCharCode(
    view.getUint8(pos),
    view.getUint8(pos + 1),
    view.getUint8(pos + 2),
    view.getUint8(pos + 3),
  );
}

export function decodeWav(buf: ArrayBuffer): DecodedWav {
  const view = new DataView(buf);
  if (buf.byteLength < 12 || ascii(view, 0) !== "RIFF" || ascii(view, 8) !== "WAVE") {
    throw new Error("not a RIFF/WAVE file");
  }
  let pos = 12;
  let rate = 0;
  let bits = 0;
  let channels = 0;
  let data: Uint8Array | null = null;
  while (pos + 8 <= buf.byteLength) {
    const id = ascii(view, pos);
    const size = view.getUint32(pos + 4, true);
    if (pos + 8 + size > buf.byteLength) {
      throw new Error("truncated chunk");
    }
    if (id === "fmt ") {
      if (view.getUint16(pos + 8, true) !== 1) {
        throw new Error("only PCM supported");
      }
      channels = view.getUint16(pos + 10, true);
      rate = view.getUint32(pos + 12, true);
      bits = view.getUint16(pos + 22, true);
    } else if (id === "data") {
      data = new Uint8Array(buf, pos + 8, size);
    }
    pos += 8 + size + (size & 1); // chunks are word-aligned
  }
  if (!rate || !data) throw new Error("missing fmt or data chunk");
  if (channels !== 1) throw new Error("only mono supported");
  return { rate, samples: decodePcm(data, bits) };
}

function decodePcm(data: Uint8Array, bits: number): Float32Array {
  if (bits === 16) {
    const n = data.length >> 1;
    const out = new Float32Array(n);
    for (let i = 0; i < n; i++) {
      let v = data[2 * i]! | (data[2 * i + 1]! << 8);
      if (v >= 0x8000) v -= 0x10000;
      out[i] = v / 0x8000;
    }
    return out;
  }
  if (bits === 24) {
    const n = Math.floor(data.length / 3);
    const out = new Float32Array(n);
    for (let i = 0; i < n; i++) {
      let v = data[3 * i]! | (data[3 * i + 1]! << 8) | (data[3 * i + 2]! << 16);
      if (v >= 0x800000) v -= 0x1000000;
      out[i] = v / 0x800000;
    }
    return out;
  }
  throw new Error(`unsupported bit depth ${bits}`);
}
