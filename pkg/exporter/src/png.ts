/**
 * Minimal PNG decoder: 8-bit depth, color types gray / RGB / gray+alpha /
 * RGBA, non-interlaced. Covers what txt2img endpoints and common image
 * tools emit; palette and 16-bit files are rejected with a clear error.
 */

import { inflateSync } from "node:zlib";

export class ImageFormatError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ImageFormatError";
  }
}

export interface RawImage {
  width: number;
  height: number;
  /** 1 = gray, 2 = gray+alpha, 3 = RGB, 4 = RGBA; interleaved row-major. */
  channels: number;
  data: Uint8Array;
}

const SIGNATURE = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);

const CHANNELS_FOR_COLOR_TYPE: Record<number, number> = { 0: 1, 2: 3, 4: 2, 6: 4 };

export function isPng(buf: Buffer): boolean {
  return buf.length >= 8 && buf.subarray(0, 8).equals(SIGNATURE);
}

function paeth(a: number, b: number, c: number): number {
  const p = a + b - c;
  const pa = Math.abs(p - a);
  const pb = Math.abs(p - b);
  const pc = Math.abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

export function decodePng(buf: Buffer): RawImage {
  if (!isPng(buf)) throw new ImageFormatError("not a PNG file");

  let width = 0;
  let height = 0;
  let channels = 0;
  const idat: Buffer[] = [];
  let sawIhdr = false;

  let off = 8;
  while (off + 8 <= buf.length) {
    const len = buf.readUInt32BE(off);
    const type = buf.toString("ascii", off + 4, off + 8);
    const dataStart = off + 8;
    if (dataStart + len + 4 > buf.length) {
      throw new ImageFormatError(`truncated ${type} chunk`);
    }
    if (type === "IHDR") {
      width = buf.readUInt32BE(dataStart);
      height = buf.readUInt32BE(dataStart + 4);
      const bitDepth = buf.readUInt8(dataStart + 8);
      const colorType = buf.readUInt8(dataStart + 9);
      const compression = buf.readUInt8(dataStart + 10);
      const filter = buf.readUInt8(dataStart + 11);
      const interlace = buf.readUInt8(dataStart + 12);
      if (bitDepth !== 8) throw new ImageFormatError(`unsupported bit depth ${bitDepth}`);
      const ch = CHANNELS_FOR_COLOR_TYPE[colorType];
      if (ch === undefined) throw new ImageFormatError(`unsupported color type ${colorType}`);
      if (compression !== 0 || filter !== 0) {
        throw new ImageFormatError("unsupported compression/filter method");
      }
      if (interlace !== 0) throw new ImageFormatError("interlaced PNG not supported");
      channels = ch;
      sawIhdr = true;
    } else if (type === "IDAT") {
      idat.push(buf.subarray(dataStart, dataStart + len));
    } else if (type === "IEND") {
      break;
    }
    off = dataStart + len + 4; // skip data + CRC
  }
  if (!sawIhdr) throw new ImageFormatError("missing IHDR chunk");
  if (idat.length === 0) throw new ImageFormatError("missing IDAT chunks");

  const raw = inflateSync(Buffer.concat(idat));
  const stride = width * channels;
  if (raw.length !== height * (stride + 1)) {
    throw new ImageFormatError(
      `decompressed size ${raw.length}, expected ${height * (stride + 1)}`,
    );
  }

  const out = new Uint8Array(height * stride);
  const bpp = channels; // 8-bit depth: one byte per sample
  for (let y = 0; y < height; y++) {
    const filterByte = raw[y * (stride + 1)];
    const line = raw.subarray(y * (stride + 1) + 1, (y + 1) * (stride + 1));
    const row = y * stride;
    const prev = row - stride;
    for (let i = 0; i < stride; i++) {
      const left = i >= bpp ? out[row + i - bpp] : 0;
      const up = y > 0 ? out[prev + i] : 0;
      const upLeft = y > 0 && i >= bpp ? out[prev + i - bpp] : 0;
      let v = line[i];
      switch (filterByte) {
        case 0:
          break;
        case 1:
          v += left;
          break;
        case 2:
          v += up;
          break;
        case 3:
          v += (left + up) >> 1;
          break;
        case 4:
          v += paeth(left, up, upLeft);
          break;
        default:
          throw new ImageFormatError(`unknown filter type ${filterByte} in row ${y}`);
      }
      out[row + i] = v & 0xff;
    }
  }
  return { width, height, channels, data: out };
}
