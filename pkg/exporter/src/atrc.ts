/**
 * ATRC binary trace files: little-endian, 28-byte header, row-major payload.
 *
 * Header layout (byte offsets):
 *   0..3   magic "ATRC"
 *   4..5   version u16 (= 1)
 *   6      dtype u8 (1 = f32, 2 = f64)
 *   7      flags u8 (= 0)
 *   8..11  reserved u32 (= 0)
 *   12..19 rows u64
 *   20..27 cols u64
 *
 * This mirrors the Python toolkit's trace-store byte for byte; files
 * written here must parse there and vice versa.
 */

import { readFileSync, writeFileSync } from "node:fs";

export const HEADER_SIZE = 28;
export const MAGIC = "ATRC";
export const VERSION = 1;

export type Dtype = "f32" | "f64";

const DTYPE_CODE: Record<Dtype, 1 | 2> = { f32: 1, f64: 2 };
const ITEM_SIZE: Record<Dtype, 4 | 8> = { f32: 4, f64: 8 };

export type FormatErrorKind = "magic" | "length" | "dtype" | "version" | "invariant";

export class FormatError extends Error {
  constructor(
    readonly kind: FormatErrorKind,
    message: string,
  ) {
    super(message);
    this.name = "FormatError";
  }
}

export interface TraceMatrix {
  rows: number;
  cols: number;
  dtype: Dtype;
  /** Row-major values, rows * cols entries. */
  data: Float32Array | Float64Array;
}

export function traceMatrix(
  rows: number,
  cols: number,
  dtype: Dtype,
  data: Float32Array | Float64Array,
): TraceMatrix {
  if (!Number.isInteger(rows) || rows < 0) {
    throw new FormatError("invariant", `rows must be a non-negative integer, got ${rows}`);
  }
  if (!Number.isInteger(cols) || cols < 1) {
    throw new FormatError("invariant", `cols must be a positive integer, got ${cols}`);
  }
  if (data.length !== rows * cols) {
    throw new FormatError(
      "invariant",
      `data holds ${data.length} values, expected ${rows}x${cols} = ${rows * cols}`,
    );
  }
  const wantCtor = dtype === "f32" ? Float32Array : Float64Array;
  if (!(data instanceof wantCtor)) {
    throw new FormatError("invariant", `dtype ${dtype} needs a ${wantCtor.name}`);
  }
  for (let i = 0; i < data.length; i++) {
    if (!Number.isFinite(data[i])) {
      throw new FormatError("invariant", `non-finite value at flat index ${i}`);
    }
  }
  return { rows, cols, dtype, data };
}

export function encodeTraceMatrix(m: TraceMatrix): Buffer {
  traceMatrix(m.rows, m.cols, m.dtype, m.data);
  const itemSize = ITEM_SIZE[m.dtype];
  const buf = Buffer.alloc(HEADER_SIZE + m.data.length * itemSize);
  buf.write(MAGIC, 0, "ascii");
  buf.writeUInt16LE(VERSION, 4);
  buf.writeUInt8(DTYPE_CODE[m.dtype], 6);
  buf.writeUInt8(0, 7);
  buf.writeUInt32LE(0, 8);
  buf.writeBigUInt64LE(BigInt(m.rows), 12);
  buf.writeBigUInt64LE(BigInt(m.cols), 20);
  const view = new DataView(buf.buffer, buf.byteOffset + HEADER_SIZE);
  if (m.dtype === "f32") {
    for (let i = 0; i < m.data.length; i++) view.setFloat32(i * 4, m.data[i], true);
  } else {
    for (let i = 0; i < m.data.length; i++) view.setFloat64(i * 8, m.data[i], true);
  }
  return buf;
}

export function decodeTraceMatrix(buf: Buffer): TraceMatrix {
  if (buf.length < HEADER_SIZE) {
    throw new FormatError("length", `file is ${buf.length} bytes, header needs ${HEADER_SIZE}`);
  }
  if (buf.toString("ascii", 0, 4) !== MAGIC) {
    throw new FormatError("magic", "bad magic, not an ATRC file");
  }
  const version = buf.readUInt16LE(4);
  if (version !== VERSION) {
    throw new FormatError("version", `unsupported version ${version}`);
  }
  const code = buf.readUInt8(6);
  const dtype: Dtype | undefined = code === 1 ? "f32" : code === 2 ? "f64" : undefined;
  if (dtype === undefined) {
    throw new FormatError("dtype", `unknown dtype code ${code}`);
  }
  const rows = Number(buf.readBigUInt64LE(12));
  const cols = Number(buf.readBigUInt64LE(20));
  const itemSize = ITEM_SIZE[dtype];
  const wantBytes = rows * cols * itemSize;
  if (buf.length - HEADER_SIZE !== wantBytes) {
    throw new FormatError(
      "length",
      `payload is ${buf.length - HEADER_SIZE} bytes, header implies ${wantBytes}`,
    );
  }
  if (cols < 1) {
    throw new FormatError("invariant", `cols must be positive, got ${cols}`);
  }
  const view = new DataView(buf.buffer, buf.byteOffset + HEADER_SIZE, wantBytes);
  const n = rows * cols;
  if (dtype === "f32") {
    const out = new Float32Array(n);
    for (let i = 0; i < n; i++) out[i] = view.getFloat32(i * 4, true);
    return { rows, cols, dtype, data: out };
  }
  const out = new Float64Array(n);
  for (let i = 0; i < n; i++) out[i] = view.getFloat64(i * 8, true);
  return { rows, cols, dtype, data: out };
}

export function writeTraceMatrix(m: TraceMatrix, path: string): void {
  writeFileSync(path, encodeTraceMatrix(m));
}

export function readTraceMatrix(path: string): TraceMatrix {
  return decodeTraceMatrix(readFileSync(path));
}

/** Class labels travel as an Nx1 f32 matrix of small integers. */
export function writeLabels(labels: number[], path: string): void {
  const data = new Float32Array(labels.length);
  for (let i = 0; i < labels.length; i++) {
    if (!Number.isInteger(labels[i]) || labels[i] < 0) {
      throw new FormatError("invariant", `label at ${i} must be a non-negative integer`);
    }
    data[i] = labels[i];
  }
  writeTraceMatrix(traceMatrix(labels.length, 1, "f32", data), path);
}

export function readLabels(path: string, numClasses: number): number[] {
  const m = readTraceMatrix(path);
  if (m.cols !== 1) {
    throw new FormatError("invariant", `label file must be Nx1, got ${m.rows}x${m.cols}`);
  }
  const out: number[] = [];
  for (let i = 0; i < m.rows; i++) {
    const v = Math.round(m.data[i]);
    if (v < 0 || v >= numClasses) {
      throw new FormatError("invariant", `label ${v} at row ${i} outside [0, ${numClasses})`);
    }
    out.push(v);
  }
  return out;
}
