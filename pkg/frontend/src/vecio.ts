/**
 * Binary vector file format shared with the Python package.
 *
 * Each record is an 8-byte magic "WSPROXF8", an 8-byte little-endian
 * unsigned length, then that many little-endian float64 values. A file may
 * hold several records back to back. Text files hold one decimal per line.
 */

export const MAGIC = Buffer.from("WSPROXF8", "ascii");
const HEADER_SIZE = 16;

export function encodeVectors(vectors: readonly Float64Array[]): Buffer {
  const parts: Buffer[] = [];
  for (const vec of vectors) {
    const header = Buffer.alloc(HEADER_SIZE);
    MAGIC.copy(header, 0);
    header.writeBigUInt64LE(BigInt(vec.length), 8);
    parts.push(header);
    // Copy the payload so later mutation of the input can't affect the file.
    const payload = Buffer.alloc(vec.length * 8);
    for (let i = 0; i < vec.length; i++) {
      payload.writeDoubleLE(vec[i], i * 8);
    }
    parts.push(payload);
  }
  return Buffer.concat(parts);
}

export function decodeVectors(raw: Buffer): Float64Array[] {
  if (raw.length < 8 || !raw.subarray(0, 8).equals(MAGIC)) {
    throw new Error("missing binary magic");
  }
  const out: Float64Array[] = [];
  let off = 0;
  while (off < raw.length) {
    if (raw.length - off < HEADER_SIZE) {
      throw new Error(`truncated binary header at offset ${off}`);
    }
    if (!raw.subarray(off, off + 8).equals(MAGIC)) {
      throw new Error(`bad record magic at offset ${off}`);
    }
    const count = Number(raw.readBigUInt64LE(off + 8));
    off += HEADER_SIZE;
    const nbytes = 8 * count;
    if (raw.length - off < nbytes) {
      throw new Error(`truncated binary payload at offset ${off}`);
    }
    const vec = new Float64Array(count);
    for (let i = 0; i < count; i++) {
      vec[i] = raw.readDoubleLE(off + i * 8);
    }
    out.push(vec);
    off += nbytes;
  }
  if (out.length === 0) {
    throw new Error("no records");
  }
  return out;
}

export function encodeTextVector(vec: Float64Array): string {
  let text = "";
  for (const v of vec) {
    text += `${v}\n`;
  }
  return text;
}
