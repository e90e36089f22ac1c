import { ImageTensor } from "../src/index.js";

/** mulberry32: tiny deterministic PRNG for fixture content. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) | 0;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function makeTensor(channels: number, height: number, width: number, seed: number): ImageTensor {
  const next = mulberry32(seed);
  const data = new Float32Array(channels * height * width);
  for (let i = 0; i < data.length; i++) {
    data[i] = Math.fround(next());
  }
  return { channels, height, width, data };
}

export const CLI_COMMAND = (process.env.CROPFOLD_CLI ?? "python3 -m cropfold.cli").split(/\s+/);
