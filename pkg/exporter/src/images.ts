/**
 * Image ingestion for exports: read PNG / PGM / PPM files, convert to
 * grayscale, resize with bilinear resampling, and flatten to the
 * classifier's input vector.
 *
 * Resampling uses half-pixel centers (destination pixel (dx, dy) samples
 * the source at ((dx + 0.5) * sx - 0.5, (dy + 0.5) * sy - 0.5), clamped)
 * with no antialiasing prefilter. Pixel values are normalized to [0, 1].
 */

import { readFileSync } from "node:fs";

import { ImageFormatError, RawImage, decodePng, isPng } from "./png.js";

export interface FloatImage {
  width: number;
  height: number;
  channels: number;
  /** Interleaved row-major samples in [0, 1]. */
  data: Float64Array;
}

/** Parse the ASCII header of a PGM (P5) or PPM (P6) file. */
function parseNetpbm(buf: Buffer): RawImage {
  const magic = buf.toString("ascii", 0, 2);
  const channels = magic === "P5" ? 1 : magic === "P6" ? 3 : 0;
  if (channels === 0) throw new ImageFormatError(`unknown netpbm magic '${magic}'`);

  // header tokens: width, height, maxval; '#' starts a comment to EOL
  const fields: number[] = [];
  let pos = 2;
  while (fields.length < 3) {
    if (pos >= buf.length) throw new ImageFormatError("truncated netpbm header");
    const c = buf[pos];
    if (c === 0x23) {
      while (pos < buf.length && buf[pos] !== 0x0a) pos++;
    } else if (c === 0x20 || c === 0x09 || c === 0x0a || c === 0x0d) {
      pos++;
    } else {
      let end = pos;
      while (end < buf.length && buf[end] > 0x20) end++;
      const tok = buf.toString("ascii", pos, end);
      const v = Number(tok);
      if (!Number.isInteger(v) || v < 0) {
        throw new ImageFormatError(`bad netpbm header token '${tok}'`);
      }
      fields.push(v);
      pos = end;
    }
  }
  pos++; // single whitespace byte separates header from raster
  const [width, height, maxval] = fields;
  if (maxval !== 255) throw new ImageFormatError(`unsupported netpbm maxval ${maxval}`);
  const want = width * height * channels;
  if (buf.length - pos < want) {
    throw new ImageFormatError(`netpbm raster holds ${buf.length - pos} bytes, want ${want}`);
  }
  return { width, height, channels, data: new Uint8Array(buf.subarray(pos, pos + want)) };
}

export function readImage(path: string): RawImage {
  const buf = readFileSync(path);
  if (isPng(buf)) return decodePng(buf);
  const magic = buf.toString("ascii", 0, 2);
  if (magic === "P5" || magic === "P6") return parseNetpbm(buf);
  throw new ImageFormatError(`${path}: not a PNG, PGM, or PPM file`);
}

/** Drop alpha and/or collapse color to Rec. 601 luma. */
export function toGrayscale(img: RawImage): RawImage {
  if (img.channels === 1) return img;
  const n = img.width * img.height;
  const out = new Uint8Array(n);
  for (let i = 0; i < n; i++) {
    const base = i * img.channels;
    if (img.channels === 2) {
      out[i] = img.data[base];
    } else {
      const r = img.data[base];
      const g = img.data[base + 1];
      const b = img.data[base + 2];
      out[i] = Math.round(0.299 * r + 0.587 * g + 0.114 * b);
    }
  }
  return { width: img.width, height: img.height, channels: 1, data: out };
}

/** Drop alpha, keep RGB. Grayscale input is rejected, not replicated. */
export function toRgb(img: RawImage): RawImage {
  if (img.channels === 3) return img;
  if (img.channels === 4) {
    const n = img.width * img.height;
    const out = new Uint8Array(n * 3);
    for (let i = 0; i < n; i++) {
      out[i * 3] = img.data[i * 4];
      out[i * 3 + 1] = img.data[i * 4 + 1];
      out[i * 3 + 2] = img.data[i * 4 + 2];
    }
    return { width: img.width, height: img.height, channels: 3, data: out };
  }
  throw new ImageFormatError(`classifier expects RGB input, image has ${img.channels} channel(s)`);
}

export function toFloat(img: RawImage): FloatImage {
  const data = new Float64Array(img.data.length);
  for (let i = 0; i < img.data.length; i++) data[i] = img.data[i] / 255.0;
  return { width: img.width, height: img.height, channels: img.channels, data };
}

export function bilinearResize(img: FloatImage, width: number, height: number): FloatImage {
  if (width < 1 || height < 1) throw new ImageFormatError("target size must be positive");
  if (width === img.width && height === img.height) return img;
  const { channels } = img;
  const out = new Float64Array(width * height * channels);
  const sx = img.width / width;
  const sy = img.height / height;
  for (let dy = 0; dy < height; dy++) {
    const srcY = Math.min(Math.max((dy + 0.5) * sy - 0.5, 0), img.height - 1);
    const y0 = Math.floor(srcY);
    const y1 = Math.min(y0 + 1, img.height - 1);
    const fy = srcY - y0;
    for (let dx = 0; dx < width; dx++) {
      const srcX = Math.min(Math.max((dx + 0.5) * sx - 0.5, 0), img.width - 1);
      const x0 = Math.floor(srcX);
      const x1 = Math.min(x0 + 1, img.width - 1);
      const fx = srcX - x0;
      for (let c = 0; c < channels; c++) {
        const v00 = img.data[(y0 * img.width + x0) * channels + c];
        const v01 = img.data[(y0 * img.width + x1) * channels + c];
        const v10 = img.data[(y1 * img.width + x0) * channels + c];
        const v11 = img.data[(y1 * img.width + x1) * channels + c];
        const top = v00 + (v01 - v00) * fx;
        const bot = v10 + (v11 - v10) * fx;
        out[(dy * width + dx) * channels + c] = top + (bot - top) * fy;
      }
    }
  }
  return { width, height, channels, data: out };
}

/** Row-major, channel-interleaved flattening into a classifier input. */
export function flatten(img: FloatImage): Float64Array {
  return img.data;
}
