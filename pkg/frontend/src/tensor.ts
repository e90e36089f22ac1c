/**
 * Image tensors and the raw tensor wire format (.cmtx).
 *
 * Layout, little-endian throughout:
 *   bytes 0..3   magic "CMTX"
 *   byte  4      version (1)
 *   bytes 5..16  C, H, W as uint32
 *   bytes 17..   C*H*W float32 values, channel-major
 */

export interface ImageTensor {
  channels: number;
  height: number;
  width: number;
  /** channel-major values in [0, 1], length channels * height * width */
  data: Float32Array;
}

export const RAW_MAGIC = "CMTX";
export const RAW_VERSION = 1;
export const RAW_HEADER_SIZE = 17;

/** Input failed structural or range validation; names the offending field. */
export class ValidationError extends Error {
  constructor(readonly field: string, message: string) {
    super(`${field}: ${message}`);
    this.name = "ValidationError";
  }
}

/** A byte stream violates the raw tensor format. */
export class RawFormatError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "RawFormatError";
  }
}

export function validateImage(image: ImageTensor, field = "image"): void {
  const { channels, height, width, data } = image;
  for (const [name, value] of [
    ["channels", channels],
    ["height", height],
    ["width", width],
  ] as const) {
    if (!Number.isInteger(value) || value < 1) {
      throw new ValidationError(`${field}.${name}`, `must be an integer >= 1, got ${value}`);
    }
  }
  if (!(data instanceof Float32Array)) {
    throw new ValidationError(`${field}.data`, "must be a Float32Array");
  }
  const expected = channels * height * width;
  if (data.length !== expected) {
    throw new ValidationError(
      `${field}.data`,
      `length ${data.length} does not match C*H*W = ${expected}`,
    );
  }
  for (let i = 0; i < data.length; i++) {
    const v = data[i];
    if (!Number.isFinite(v) || v < 0 || v > 1) {
      throw new ValidationError(`${field}.data`, `value ${v} at index ${i} outside [0, 1]`);
    }
  }
}

export function encodeRawTensor(image: ImageTensor): Buffer {
  validateImage(image);
  const { channels, height, width, data } = image;
  const buf = Buffer.alloc(RAW_HEADER_SIZE + 4 * data.length);
  buf.write(RAW_MAGIC, 0, "ascii");
  buf.writeUInt8(RAW_VERSION, 4);
  buf.writeUInt32LE(channels, 5);
  buf.writeUInt32LE(height, 9);
  buf.writeUInt32LE(width, 13);
  for (let i = 0; i < data.length; i++) {
    buf.writeFloatLE(data[i], RAW_HEADER_SIZE + 4 * i);
  }
  return buf;
}

export function decodeRawTensor(buf: Buffer): ImageTensor {
  if (buf.length < RAW_HEADER_SIZE) {
    throw new RawFormatError(`header truncated: expected ${RAW_HEADER_SIZE} bytes, got ${buf.length}`);
  }
  const magic = buf.toString("ascii", 0, 4);
  if (magic !== RAW_MAGIC) {
    throw new RawFormatError(`bad magic ${JSON.stringify(magic)}, expected ${RAW_MAGIC}`);
  }
  const version = buf.readUInt8(4);
  if (version !== RAW_VERSION) {
    throw new RawFormatError(`unsupported version ${version}, expected ${RAW_VERSION}`);
  }
  const channels = buf.readUInt32LE(5);
  const height = buf.readUInt32LE(9);
  const width = buf.readUInt32LE(13);
  if (channels < 1 || height < 1 || width < 1) {
    throw new RawFormatError(`invalid dims (${channels}, ${height}, ${width})`);
  }
  const count = channels * height * width;
  const expected = RAW_HEADER_SIZE + 4 * count;
  if (buf.length < expected) {
    throw new RawFormatError(`payload truncated: expected ${expected} bytes, got ${buf.length}`);
  }
  const data = new Float32Array(count);
  for (let i = 0; i < count; i++) {
    data[i] = buf.readFloatLE(RAW_HEADER_SIZE + 4 * i);
  }
  const image = { channels, height, width, data };
  validateImage(image, "payload");
  return image;
}
