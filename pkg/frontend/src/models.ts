/**
 * Deterministic stub models, mirroring the engine's reference stubs so
 * a session driven here replays bit-for-bit against one driven by the
 * Python CLI from the same seeds.
 */

import type { LanguageModel } from "./engine.js";
import { uniformBlock } from "./rng.js";

const MASK64 = (1n << 64n) - 1n;

/**
 * Pseudo-random distribution per step, flat-Dirichlet flavored: V
 * uniforms normalized by their ascending-order sum.  The draw window
 * for a prefix of length k is [k*V, (k+1)*V), so the distribution
 * depends only on (seed, prefix length) and replays exactly anywhere
 * the counter stream exists.
 */
export class RandomLogit implements LanguageModel {
  readonly seed: bigint;
  readonly vocabSize: number;

  constructor(seed: bigint, vocabSize: number) {
    this.seed = seed & MASK64;
    this.vocabSize = vocabSize;
  }

  nextDistribution(prefix: readonly number[]): Float64Array {
    const n = this.vocabSize;
    const us = uniformBlock(this.seed, prefix.length * n, n);
    let total = 0.0;
    for (let i = 0; i < n; i++) {
      total += us[i];
    }
    // plain per-element division, matching the reference model
    for (let i = 0; i < n; i++) {
      us[i] = us[i] / total;
    }
    return us;
  }
}

/**
 * Replays a fixed token list: all mass on the scripted token for the
 * current position, then on eos once the script runs out.
 */
export class ScriptedModel implements LanguageModel {
  readonly script: number[];
  readonly vocabSize: number;
  readonly eosId: number;

  constructor(tokenIds: readonly number[], vocabSize: number, eosId: number) {
    for (const tid of tokenIds) {
      if (!Number.isInteger(tid) || tid < 0 || tid >= vocabSize) {
        throw new RangeError(`scripted token id ${tid} outside vocabulary`);
      }
    }
    this.script = [...tokenIds];
    this.vocabSize = vocabSize;
    this.eosId = eosId;
  }

  nextDistribution(prefix: readonly number[]): Float64Array {
    const k = prefix.length;
    const tid = k < this.script.length ? this.script[k] : this.eosId;
    const dist = new Float64Array(this.vocabSize);
    dist[tid] = 1.0;
    return dist;
  }
}
