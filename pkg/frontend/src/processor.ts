/**
 * Adapter for logits-processor callback APIs of the common shape
 * (inputIds, scores) -> scores: every token the current machine state
 * forbids is pushed to -Infinity, everything permitted is left alone,
 * so whatever sampler runs downstream can only pick valid tokens.
 */

import type { TokenMachine } from "./artifact.js";
import { DimensionMismatch, ForbiddenToken } from "./errors.js";

export interface LogitsProcessor {
  process(logits: Float32Array, inputIds: number[]): Float32Array;
}

export interface ProcessorOptions {
  /**
   * How many leading ids are prompt rather than machine output.  When
   * omitted, the length of the first process() call's inputIds is
   * captured as the prompt length, matching the usual generate() flow
   * where the first call sees only the prompt.
   */
  promptLength?: number;
}

/** Masks scores in place against the machine state reached by the generated suffix. */
export class MaskLogitsProcessor implements LogitsProcessor {
  private readonly machine: TokenMachine;
  private promptLength: number | undefined;
  // incremental walk cache; valid while inputIds only ever grows
  private walked = 0;
  private state: number;

  constructor(machine: TokenMachine, options: ProcessorOptions = {}) {
    this.machine = machine;
    this.promptLength = options.promptLength;
    this.state = machine.start;
  }

  process(logits: Float32Array, inputIds: number[]): Float32Array {
    if (logits.length !== this.machine.vocabSize) {
      throw new DimensionMismatch(this.machine.vocabSize, logits.length, "logits");
    }
    if (this.promptLength === undefined) {
      this.promptLength = inputIds.length;
    }
    const generated = inputIds.length - this.promptLength;
    if (generated < this.walked) {
      this.walked = 0;
      this.state = this.machine.start;
    }
    for (let i = this.walked; i < generated; i++) {
      const tid = inputIds[this.promptLength + i];
      const next = this.machine.transitions[this.state].get(tid);
      if (next === undefined) {
        throw new ForbiddenToken(this.state, tid);
      }
      this.state = next;
    }
    this.walked = generated;

    const mask = this.machine.masks[this.state];
    for (let i = 0; i < logits.length; i++) {
      if (((mask[i >> 3] >> (i & 7)) & 1) === 0) {
        logits[i] = -Infinity;
      }
    }
    return logits;
  }
}

/** Functional form of MaskLogitsProcessor for APIs that take a bare callback. */
export function createLogitsProcessor(
  machine: TokenMachine,
  options: ProcessorOptions = {},
): (inputIds: number[], scores: Float32Array) => Float32Array {
  const processor = new MaskLogitsProcessor(machine, options);
  return (inputIds, scores) => processor.process(scores, inputIds);
}
