/**
 * BoundPipeline: the augmentation pipeline exposed to Node.
 *
 * The binding performs zero pixel arithmetic. Each call forwards the input
 * tensor to the pipeline CLI through the raw tensor wire format, runs exactly
 * one sample at the requested index, and reads back the output tensor and its
 * manifest. Because the numeric path is the CLI's own, results are
 * byte-identical to what the CLI produces for the same (config, seed, index,
 * source).
 */

import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import {
  ImageTensor,
  ValidationError,
  decodeRawTensor,
  encodeRawTensor,
  validateImage,
} from "./tensor.js";

/** The CLI reported a failure or produced unusable output. */
export class PipelineError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "PipelineError";
  }
}

export type ConfigMapping = Record<string, string | number | boolean | Array<string | number>>;

export interface SampleManifest {
  source: string;
  root_seed: number;
  sample_index: number;
  config_digest: string;
  plan: Record<string, unknown>;
  outputs: string[];
}

export interface BoundPipelineOptions {
  /** Command used to invoke the pipeline CLI; defaults to ["cropfold"],
   * overridable with the CROPFOLD_CLI environment variable (space-split). */
  command?: string[];
}

function defaultCommand(): string[] {
  const env = process.env.CROPFOLD_CLI;
  if (env && env.trim()) {
    return env.trim().split(/\s+/);
  }
  return ["cropfold"];
}

function configToDocument(config: ConfigMapping): string {
  const lines: string[] = [];
  for (const [key, value] of Object.entries(config)) {
    lines.push(`${key} = ${renderValue(value)}`);
  }
  return lines.join("\n") + "\n";
}

function renderValue(value: string | number | boolean | Array<string | number>): string {
  if (Array.isArray(value)) {
    return `[${value.map((v) => renderValue(v)).join(", ")}]`;
  }
  if (typeof value === "string") {
    return JSON.stringify(value);
  }
  return String(value);
}

export class BoundPipeline {
  readonly seed: number;
  readonly configPath: string;
  private readonly command: string[];
  private readonly ownsConfig: boolean;

  constructor(config: string | ConfigMapping, seed: number, options: BoundPipelineOptions = {}) {
    if (!Number.isInteger(seed) || seed < 0) {
      throw new ValidationError("seed", `must be a non-negative integer, got ${seed}`);
    }
    this.seed = seed;
    this.command = options.command ?? defaultCommand();
    if (typeof config === "string") {
      this.configPath = config;
      this.ownsConfig = false;
    } else {
      const dir = fs.mkdtempSync(path.join(os.tmpdir(), "cropfold-cfg-"));
      this.configPath = path.join(dir, "pipeline.cfg");
      fs.writeFileSync(this.configPath, configToDocument(config));
      this.ownsConfig = true;
    }
    // validate the config the same way the CLI does: a plan-only run
    const probe = this.runCli(["stats", "--config", this.configPath, "--seed", "0", "--count", "1"]);
    if (probe.status !== 0) {
      throw new PipelineError(`config rejected by pipeline: ${probe.stderr.trim()}`);
    }
  }

  /** Augment one image at a sample index; returns a newly allocated tensor. */
  apply(image: ImageTensor, sampleIndex: number): ImageTensor {
    return this.run(image, sampleIndex).output;
  }

  /** The manifest the pipeline records for this (image, index) application. */
  plan(image: ImageTensor, sampleIndex: number): SampleManifest {
    return this.run(image, sampleIndex).manifest;
  }

  /** One CLI round trip producing both the output tensor and its manifest. */
  run(image: ImageTensor, sampleIndex: number): { output: ImageTensor; manifest: SampleManifest } {
    validateImage(image, "image");
    if (!Number.isInteger(sampleIndex) || sampleIndex < 0) {
      throw new ValidationError("sampleIndex", `must be a non-negative integer, got ${sampleIndex}`);
    }
    const work = fs.mkdtempSync(path.join(os.tmpdir(), "cropfold-run-"));
    try {
      const inputDir = path.join(work, "input");
      const outputDir = path.join(work, "output");
      fs.mkdirSync(inputDir);
      fs.writeFileSync(path.join(inputDir, "image.cmtx"), encodeRawTensor(image));
      const result = this.runCli([
        "sample",
        "--input", inputDir,
        "--output", outputDir,
        "--config", this.configPath,
        "--seed", String(this.seed),
        "--count", "1",
        "--start", String(sampleIndex),
        "--workers", "1",
        "--formats", "raw",
      ]);
      if (result.status !== 0) {
        throw new PipelineError(`pipeline run failed: ${result.stderr.trim()}`);
      }
      const rawBytes = fs.readFileSync(path.join(outputDir, `sample_${sampleIndex}.cmtx`));
      const manifestText = fs.readFileSync(path.join(outputDir, `sample_${sampleIndex}.json`), "utf8");
      return {
        output: decodeRawTensor(rawBytes),
        manifest: JSON.parse(manifestText) as SampleManifest,
      };
    } finally {
      fs.rmSync(work, { recursive: true, force: true });
    }
  }

  /** Remove the temporary config document, if this instance created one. */
  dispose(): void {
    if (this.ownsConfig) {
      fs.rmSync(path.dirname(this.configPath), { recursive: true, force: true });
    }
  }

  private runCli(args: string[]): { status: number | null; stdout: string; stderr: string } {
    const [cmd, ...prefix] = this.command;
    const result = spawnSync(cmd, [...prefix, ...args], {
      encoding: "utf8",
      maxBuffer: 64 * 1024 * 1024,
    });
    if (result.error) {
      throw new PipelineError(`cannot invoke pipeline CLI '${this.command.join(" ")}': ${result.error.message}`);
    }
    return { status: result.status, stdout: result.stdout, stderr: result.stderr };
  }
}
